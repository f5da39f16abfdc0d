#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treetab {

/// Base class for all engine errors.
class TreetabError : public std::runtime_error {
public:
    explicit TreetabError(const std::string& what) : std::runtime_error(what) {}
};

/// Table construction violation (ragged rows and the like).
class TableError : public TreetabError {
public:
    using TreetabError::TreetabError;
};

/// Codec decode failure. `line` is 1-based within the input text.
class CodecError : public TreetabError {
public:
    enum class Kind { MalformedTable, RaggedRow };

    CodecError(Kind kind, std::size_t line, const std::string& reason)
        : TreetabError("decode error at line " + std::to_string(line) + ": " + reason),
          kind_(kind), line_(line), reason_(reason) {}

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    Kind kind_;
    std::size_t line_;
    std::string reason_;
};

/// Op-call grammar violation. `position` is the 0-based byte offset of the
/// offending token (input length when the text ends early).
class OpParseError : public TreetabError {
public:
    OpParseError(std::size_t position, const std::string& expected)
        : TreetabError("op-call parse error at position " + std::to_string(position) +
                       ": expected " + expected),
          position_(position), expected_(expected) {}

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

/// Failure raised by a pool operation or by op-call dispatch.
class OpError : public TreetabError {
public:
    enum class Kind {
        UnknownOp,
        DuplicateArg,
        MissingArgument,
        ArgumentTypeMismatch,
        IndexOutOfRange,
        DuplicateIndex,
        UnknownColumn,
        LengthMismatch,
        DuplicateColumn,
        TypeMismatch,
        NoNumericCells,
    };

    OpError(Kind kind, const std::string& what, std::string detail = {},
            std::int64_t index = 0)
        : TreetabError(what), kind_(kind), detail_(std::move(detail)), index_(index) {}

    Kind kind() const { return kind_; }
    /// Offending name: column, op, or argument key depending on kind.
    const std::string& detail() const { return detail_; }
    /// Offending 1-based row index for the index-shaped kinds.
    std::int64_t index() const { return index_; }

private:
    Kind kind_;
    std::string detail_;
    std::int64_t index_;
};

/// Planner backend failure after retries are exhausted.
class PlannerError : public TreetabError {
public:
    using TreetabError::TreetabError;
};

/// Schema-link selection that does not resolve against the database.
class InvalidSelectionError : public TreetabError {
public:
    using TreetabError::TreetabError;
};

/// A join-path key that is not available when the merge needs it.
class JoinKeyMissingError : public TreetabError {
public:
    JoinKeyMissingError(const std::string& what, std::string fk_text)
        : TreetabError(what), fk_text_(std::move(fk_text)) {}

    const std::string& foreign_key() const { return fk_text_; }

private:
    std::string fk_text_;
};

/// Op failure wrapped with the tree node it happened at.
class ExecutionError : public TreetabError {
public:
    ExecutionError(std::string node_id, const std::string& cause)
        : TreetabError("execution failed at node " + node_id + ": " + cause),
          node_id_(std::move(node_id)) {}

    const std::string& node_id() const { return node_id_; }

private:
    std::string node_id_;
};

/// Relationship combiner could not fold the child results.
class CombinerError : public TreetabError {
public:
    CombinerError(std::string node_id, const std::string& reason)
        : TreetabError("combiner failed at node " + node_id + ": " + reason),
          node_id_(std::move(node_id)) {}

    const std::string& node_id() const { return node_id_; }

private:
    std::string node_id_;
};

class IoError : public TreetabError {
public:
    using TreetabError::TreetabError;
};

class EmptyTaskFileError : public TreetabError {
public:
    using TreetabError::TreetabError;
};

/// Replay produced a different answer or visit order than the recorded trace.
class ReplayDivergenceError : public TreetabError {
public:
    ReplayDivergenceError(const std::string& what, std::string first_divergence)
        : TreetabError(what), first_divergence_(std::move(first_divergence)) {}

    const std::string& first_divergence() const { return first_divergence_; }

private:
    std::string first_divergence_;
};

}  // namespace treetab

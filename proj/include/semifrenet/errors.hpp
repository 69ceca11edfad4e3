#pragma once

#include <stdexcept>
#include <string>

namespace semifrenet {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument (dimension mismatch, empty input, invalid grid, ...).
class argument_error : public error {
public:
    using error::error;
};

/// Expression parse failure; `offset` is the byte offset into the input text.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t offset)
        : error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation left the function's domain (division by zero, sqrt of a
/// negative value); carries the parameter value where it happened.
class eval_domain_error : public error {
public:
    eval_domain_error(const std::string& what, double at)
        : error(what + " (at s = " + std::to_string(at) + ")"), at_(at) {}
    double at() const { return at_; }

private:
    double at_;
};

/// An intermediate Gram-Schmidt vector became null within tolerance.
class degenerate_flag_error : public error {
public:
    using error::error;
};

/// Linearly dependent Gram-Schmidt input.
class rank_error : public error {
public:
    using error::error;
};

/// A curve (or a velocity vector) failed a required causal-character check.
class non_timelike_error : public error {
public:
    non_timelike_error(const std::string& what, double at)
        : error(what + " (at parameter " + std::to_string(at) + ")"), at_(at) {}
    double at() const { return at_; }

private:
    double at_;
};

/// The E4_2 Frenet convention requires a timelike principal normal.
class convention_error : public error {
public:
    using error::error;
};

/// Frame invariant drift exceeded tolerance during synthesis.
class step_size_error : public error {
public:
    using error::error;
};

/// Parallel-offset mate loses regularity at this offset.
class singular_offset_error : public error {
public:
    using error::error;
};

/// A certificate contradicts itself downstream (e.g. a square root that its
/// own conditions should have kept positive turned out not to be).
class inconsistency_error : public error {
public:
    using error::error;
};

} // namespace semifrenet

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graybatt {

// Invalid physical or solver parameter (non-positive radius, bad bounds, ...).
class ParameterDomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Surface concentration left (0, c_s_max) during simulation.
class SaturationError : public std::runtime_error {
public:
    SaturationError(char electrode, double time_s, std::size_t sample, std::string what_arg)
        : std::runtime_error(std::move(what_arg)),
          electrode_(electrode), time_s_(time_s), sample_(sample) {}

    char electrode() const { return electrode_; }   // 'p' or 'n'
    double time_s() const { return time_s_; }
    std::size_t sample() const { return sample_; }

private:
    char electrode_;
    double time_s_;
    std::size_t sample_;
};

// Two traces that must share timestamps do not.
class AlignmentError : public std::runtime_error {
public:
    AlignmentError(std::size_t first_mismatch, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), first_mismatch_(first_mismatch) {}

    std::size_t first_mismatch() const { return first_mismatch_; }

private:
    std::size_t first_mismatch_;
};

// CSV / config file violation; line is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, std::size_t line, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), file_(std::move(file)), line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A basis function produced a non-finite value after domain guards.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(int descriptor_id, std::size_t row, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), descriptor_id_(descriptor_id), row_(row) {}

    int descriptor_id() const { return descriptor_id_; }
    std::size_t row() const { return row_; }

private:
    int descriptor_id_;
    std::size_t row_;
};

// Z-score statistics undefined because a signal has zero variance.
class NormalizationError : public std::runtime_error {
public:
    NormalizationError(std::string signal, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), signal_(std::move(signal)) {}

    const std::string& signal() const { return signal_; }

private:
    std::string signal_;
};

// Free-running error prediction exceeded the divergence guard.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), step_(step) {}

    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

}  // namespace graybatt

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarplan {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Covariance could not be factored even after the full jitter ladder.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::vector<double> jitters)
        : std::runtime_error(what), jitters_(std::move(jitters)) {}

    const std::vector<double>& attempted_jitters() const noexcept { return jitters_; }

private:
    std::vector<double> jitters_;
};

class PlanningFailure : public std::runtime_error {
public:
    PlanningFailure(const std::string& what, std::size_t tree_size)
        : std::runtime_error(what), tree_size_(tree_size) {}

    std::size_t tree_size() const noexcept { return tree_size_; }

private:
    std::size_t tree_size_;
};

} // namespace sarplan

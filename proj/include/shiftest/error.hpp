#pragma once

#include <stdexcept>
#include <string>

namespace shiftest {

/// Failure stage, used by the command-line front end to pick an exit code.
enum class Stage { Input, Estimation, Inference };

class Error : public std::runtime_error {
public:
    Error(Stage stage, const std::string& what) : std::runtime_error(what), stage_(stage) {}
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(Stage::Input, what) {}
};

class EstimationError : public Error {
public:
    explicit EstimationError(const std::string& what) : Error(Stage::Estimation, what) {}
};

class InferenceError : public Error {
public:
    explicit InferenceError(const std::string& what) : Error(Stage::Inference, what) {}
};

}  // namespace shiftest

#ifndef PHONBOOST_ERRORS_HPP_
#define PHONBOOST_ERRORS_HPP_
#pragma once

#include <stdexcept>
#include <string>

namespace phonboost {

/// Malformed or unreadable input data (CSV, WAV, dataset contents).
class data_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or CLI arguments.
class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A learner failed during training; the message carries context such as the boosting round.
class training_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition of an algorithm was violated by the caller.
class invalid_argument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace phonboost

#endif  // PHONBOOST_ERRORS_HPP_

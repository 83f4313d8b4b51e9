#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace acmdp {

/// Structural invariant of a model is violated (bad kernel row, empty action
/// set, weight below one, ...).
class ModelError : public std::runtime_error {
public:
    ModelError(const std::string& what, long state = -1, long action = -1)
        : std::runtime_error(format(what, state, action)), state_(state), action_(action) {}

    long state() const { return state_; }
    long action() const { return action_; }

private:
    static std::string format(const std::string& what, long state, long action) {
        std::string msg = what;
        if (state >= 0) msg += " (state " + std::to_string(state);
        if (action >= 0) msg += ", action " + std::to_string(action);
        if (state >= 0) msg += ")";
        return msg;
    }
    long state_;
    long action_;
};

/// Iterative solver hit its iteration cap before reaching the requested
/// tolerance. Carries the last iterate so callers can inspect or resume.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                     double residual, unsigned long iterations)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                             std::to_string(iterations) + " iterations)"),
          last_iterate_(std::move(last_iterate)), residual_(residual), iterations_(iterations) {}

    const std::vector<double>& last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }
    unsigned long iterations() const { return iterations_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
    unsigned long iterations_;
};

/// A produced object failed its own verification step (e.g. an extracted
/// policy whose evaluated value exceeds the certified bound).
class CertificationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The finite data handed to a limit-style check is too short to certify the
/// requested property. Not a disproof.
class InsufficientDataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A simulation policy proposed an inadmissible action.
class PolicyError : public std::runtime_error {
public:
    PolicyError(const std::string& what, unsigned long step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
    unsigned long step() const { return step_; }

private:
    unsigned long step_;
};

/// Too many simulated paths were censored by the step cap for the estimate
/// to be trusted.
class CensoringError : public std::runtime_error {
public:
    CensoringError(const std::string& what, double censored_fraction)
        : std::runtime_error(what), censored_fraction_(censored_fraction) {}
    double censored_fraction() const { return censored_fraction_; }

private:
    double censored_fraction_;
};

} // namespace acmdp

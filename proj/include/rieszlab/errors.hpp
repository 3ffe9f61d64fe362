#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

// Error taxonomy. Every throwing path names the violated contract so callers
// can branch on the failure kind instead of parsing messages.

struct EmptySystem : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SizeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NegativeTime : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A mode with Re(lambda) >= 0 where a strictly stable one is required.
struct UnstableMode : std::domain_error {
    using std::domain_error::domain_error;
};

// Evaluation point collided with a pole of a modal sum.
struct PoleHit : std::domain_error {
    using std::domain_error::domain_error;
};

// Some |e^{tau lambda_n}| equals 1, so the unit circle meets the spectrum.
struct PoleOnCircle : std::domain_error {
    using std::domain_error::domain_error;
};

// |1 - H(z)| fell below the invertibility threshold of the rank-one update.
struct SingularFeedbackDenominator : std::domain_error {
    using std::domain_error::domain_error;
};

// No modes outside the bad region, so tail constants are undefined.
struct EmptyStableTail : std::domain_error {
    using std::domain_error::domain_error;
};

// An unstable mode has zero input coupling; pole placement is impossible.
struct Uncontrollable : std::domain_error {
    using std::domain_error::domain_error;
};

// Placed spectrum failed the post-design eigenvalue check.
struct NotHurwitz : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Power series of orbit norms grows faster than the geometric weight.
struct SeriesDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Every norm in the fit window is exactly zero.
struct ZeroNorms : std::domain_error {
    using std::domain_error::domain_error;
};

// Declared coefficient class diverges for the requested family.
struct DivergentCoupling : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Wraps any failure inside run_pipeline with the stage that produced it.
struct PipelineError : std::runtime_error {
    std::string stage;
    PipelineError(std::string stage_, const std::string& what_)
        : std::runtime_error("[" + stage_ + "] " + what_), stage(std::move(stage_)) {}
};

} // namespace rieszlab

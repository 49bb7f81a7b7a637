#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hclab/criterion.hpp"
#include "hclab/oracle.hpp"
#include "hclab/rng.hpp"

namespace hclab {

struct BatteryConfig {
    std::size_t d = 16;         ///< minimum truncation; raised to the guard band per condition
    std::size_t n_max = 64;
    std::size_t m_copies = 3;   ///< copies in the finite direct sum
    std::size_t hs_dim = 8;     ///< columns of the Hilbert-Schmidt matrices
    std::size_t ball_samples = 20;
    double radius_min = 0.05;
    double radius_max = 1.0;
    std::size_t patch_span = 4; ///< centers live on coordinates e_1..e_span
    std::size_t patch_dim = 3;  ///< at most this many active coordinates
    std::uint64_t rng_seed = 0;
    std::size_t certificate_k = 10;
    std::size_t subsequences = 5;
    double keep_probability = 0.5;
    SequenceRule seq = SequenceRule::natural();
    ConvergenceRule rule;

    /// Throws InvalidArgument on nonpositive counts or radii.
    void validate() const;
};

enum class Verdict { Pass, Fail, NotEvaluated };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct ConditionOutcome {
    std::string name;
    Verdict verdict = Verdict::NotEvaluated;
    std::size_t samples = 0;          ///< samples evaluated (stops at first failure)
    std::size_t hits = 0;
    std::vector<long> hit_exponents;  ///< per sample, -1 when missed
    std::size_t d_used = 0;
    std::string note;
    std::optional<CriterionReport> certificate;
};

struct BatteryReport {
    std::string operator_id;
    std::vector<ConditionOutcome> conditions;  ///< (i)..(v) in order
    bool consistent = false;
};

/// Fraction of target balls that contain some orbit element T^j x, j <= n_max.
double orbit_coverage(const TruncatedOperator& t, const CVector& x, const std::vector<Ball>& targets,
                      std::size_t n_max, std::size_t d = 0);

/// Random ball in H at per-block truncation d with the given number of blocks.
Ball sample_ball(Rng& rng, const BatteryConfig& cfg, std::size_t d, std::size_t blocks = 1);
/// Random Hilbert-Schmidt ball: unit-norm center supported on the top-left
/// patch of a d x cols matrix, returned column stacked.
Ball sample_hs_ball(Rng& rng, const BatteryConfig& cfg, std::size_t d, std::size_t cols);

/// Sequence-hypercyclicity proxy on random subsequences of {n_k}: every
/// sampled subsequence must hit every sampled ball pair.
ConditionOutcome hereditary_sample(const TruncatedOperator& t, const BatteryConfig& cfg, Rng rng);

/// Runs conditions (i)..(v) and sets the consistency flag.
BatteryReport run_battery(const TruncatedOperator& t, const BatteryConfig& cfg,
                          const std::string& operator_id = {});

struct Prop212Report {
    std::string sequence;
    ConditionOutcome certificate;  ///< (i), along the same sequence
    ConditionOutcome cond_ii;
    ConditionOutcome cond_iii;
    bool agree = false;
};

Prop212Report prop212_battery(const TruncatedOperator& t, const SequenceRule& seq,
                              const BatteryConfig& cfg);

} // namespace hclab

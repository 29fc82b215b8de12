#pragma once

// Discriminative OOMP: greedy selection of box features that reconstruct the
// foreground samples well and the background samples poorly.
//
// Candidate score at step k (maximized):
//   L_k(psi) = [ (1/N_f) sum_j <psi, eps_{k-1}(f_j)>^2
//              - (lambda/N_b) sum_j <psi, eps_{k-1}(b_j)>^2 ] / d_k(psi)
// with d_k(psi) = ||psi - R_{k-1}(psi)||^2 kept by the rank-one recursion
//   d_k = d_{k-1} - <psi, phi_bar_{k-1}>^2 / u_{k-1}.
//
// The direct solver evaluates the numerator from the sample residuals every
// step (cost grows with N_f + N_b). The iterative solver rescales the previous
// score using the shared image I_k and scalar S_k, two box lookups per
// candidate regardless of the sample count.

#include "dnbs/haar.hpp"
#include "dnbs/kernels.hpp"
#include "dnbs/subspace.hpp"

#include <chrono>
#include <filesystem>
#include <string_view>
#include <vector>

namespace dnbs {

struct DnbsConfig {
    int K = 30;
    double lambda = 0.25;
    /// Candidates with d <= dependence_tol are excluded for the rest of the run.
    double dependence_tol = 1e-6;
    /// Scores within this relative distance of the maximum count as tied; the
    /// lowest index wins. Collinear candidate residuals give mathematically
    /// equal scores that rounding would otherwise order arbitrarily.
    double tie_tol = 1e-9;

    void validate() const;
};

enum class Solver { direct, iterative, hierarchical };

std::string_view solver_name(Solver s) noexcept;
Solver parse_solver(std::string_view name);

enum class SelectionStatus { complete, early_stop };

struct TraceRow {
    int k = 0;
    std::size_t atom = 0;
    HaarBox box;
    double score = 0.0;
    double seconds = 0.0;  // wall time of this iteration
};

struct SelectionResult {
    Subspace subspace;
    std::vector<std::size_t> atoms{};
    std::vector<double> scores{};  // winning score per iteration
    SelectionStatus status = SelectionStatus::complete;
    std::vector<TraceRow> trace{};
    std::size_t scored_candidates = 0;  // candidate evaluations across all iterations
};

/// Per-candidate and per-sample state shared by all three solvers.
class DoompState {
public:
    DoompState(const Dictionary& dict, const SampleSet& samples, const DnbsConfig& cfg);

    const Dictionary& dictionary() const noexcept { return *dict_; }
    const SampleSet& samples() const noexcept { return *samples_; }
    const DnbsConfig& config() const noexcept { return cfg_; }
    const Subspace& subspace() const noexcept { return subspace_; }
    kernels::AtomView atoms() const noexcept;

    /// Number of bases selected so far; the next pick is basis k = selected() + 1.
    std::size_t selected() const noexcept { return subspace_.size(); }

    double fg_weight() const noexcept { return fg_weight_; }
    double bg_weight() const noexcept { return bg_weight_; }

    // d_i and the last computed score L_i for every atom.
    std::vector<double>& norms() noexcept { return d_; }
    const std::vector<double>& norms() const noexcept { return d_; }
    std::vector<double>& scores() noexcept { return score_; }
    const std::vector<double>& scores() const noexcept { return score_; }
    bool is_selected(std::size_t atom) const noexcept { return chosen_[atom] != 0; }

    /// eps_{k-1}(x) for each sample, foregrounds first, then backgrounds.
    const std::vector<Image>& residuals() const noexcept { return residual_; }
    const std::vector<IntegralImage>& residual_integrals() const noexcept { return residual_ii_; }
    /// eps_{k-2}(x), valid once at least one basis is selected.
    const std::vector<Image>& previous_residuals() const noexcept { return previous_; }
    /// alpha_k(x) = <phi_bar_{k-1}, x> per sample, same order as residuals().
    const std::vector<double>& alphas() const noexcept { return alpha_; }
    std::size_t foreground_count() const noexcept { return samples_->foregrounds.size(); }

    /// Shared precomputations for the current k (>= 2).
    const Image& shared_image() const;
    const IntegralImage& shared_integral(std::size_t k) const;
    double shared_scalar(std::size_t k) const;

    /// Appends the atom's box to the subspace, excludes it, advances the sample
    /// residuals and computes I_k, S_k for the next step. Throws LinearDependence
    /// (state unchanged) when the box is dependent on the current subspace.
    void commit(std::size_t atom);

    /// Marks an atom excluded without selecting it.
    void exclude(std::size_t atom) noexcept;

private:
    const Dictionary* dict_;
    const SampleSet* samples_;
    DnbsConfig cfg_;
    double fg_weight_;
    double bg_weight_;
    Subspace subspace_;
    std::vector<double> d_;
    std::vector<double> score_;
    std::vector<unsigned char> chosen_;
    std::vector<Image> residual_;
    std::vector<IntegralImage> residual_ii_;
    std::vector<Image> previous_;
    std::vector<double> alpha_;
    Image shared_image_;
    // Indexed by k; entries 0 and 1 unused.
    std::vector<IntegralImage> shared_ii_;
    std::vector<double> shared_s_;
};

/// I_k = (1/N_f) sum alpha_k(f) eps_{k-2}(f) - (lambda/N_b) sum alpha_k(b) eps_{k-2}(b).
/// Requires k >= 2 (at least one basis selected); throws std::logic_error otherwise.
Image precompute_Ik(const DoompState& state);

/// S_k = (1/N_f) sum alpha_k(f)^2 - (lambda/N_b) sum alpha_k(b)^2.
double precompute_Sk(const DoompState& state);

/// Discriminative score of one atom from the current residuals and the state's d_i.
/// Returns kernels::kExcluded when d_i <= tol.
double score_direct(const DoompState& state, std::size_t atom);

struct ScoreUpdate {
    double norm;   // d_i^(k)
    double score;  // L_k(psi_i)
};

/// One recursive rescoring step from (d^(k-1), L_{k-1}) for the current k >= 2.
ScoreUpdate score_iterative(const DoompState& state, std::size_t atom, double prev_norm,
                            double prev_score);

SelectionResult select_direct(const SampleSet& samples, const DnbsConfig& cfg, const Dictionary& dict);
SelectionResult select_iterative(const SampleSet& samples, const DnbsConfig& cfg, const Dictionary& dict);

/// (1/N_f) sum ||f - R(f)||^2 - (lambda/N_b) sum ||b - R(b)||^2.
double dnbs_objective(const Subspace& subspace, const SampleSet& samples, double lambda);

/// Per-iteration trace as CSV: k,atom,u0,v0,w,h,score,seconds.
void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path);

namespace detail {

/// Direct rescoring of every atom from the current residuals: d update for
/// k >= 2, then the score numerator over all samples.
void direct_rescore(DoompState& state);

/// Lowest index whose score is within tie_tol (relative) of the maximum;
/// n when every value is excluded.
std::size_t pick_winner(const double* scores, std::size_t n, double tie_tol);

/// Commits the best-scoring candidate; dependent winners are excluded and the
/// next best tried. Returns false when no candidate remains.
bool commit_best(DoompState& state, SelectionResult& result, int k,
                 std::chrono::steady_clock::time_point started);

/// Commits one chosen atom, recording it in the result. Returns false (and
/// excludes the atom) when it is dependent on the subspace.
bool try_commit(DoompState& state, SelectionResult& result, int k, std::size_t atom, double score,
                std::chrono::steady_clock::time_point started);

}  // namespace detail

}  // namespace dnbs

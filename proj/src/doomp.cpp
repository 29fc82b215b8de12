#include "dnbs/doomp.hpp"

#include "dnbs/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace dnbs {

void DnbsConfig::validate() const {
    if (K < 1) throw InvalidArgument("K must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
    if (!(dependence_tol >= 0.0)) throw InvalidArgument("dependence_tol must be >= 0");
    if (!(tie_tol >= 0.0) || !(tie_tol < 1.0)) throw InvalidArgument("tie_tol must be in [0, 1)");
}

std::string_view solver_name(Solver s) noexcept {
    switch (s) {
    case Solver::direct: return "direct";
    case Solver::iterative: return "iterative";
    case Solver::hierarchical: return "hierarchical";
    }
    return "unknown";
}

Solver parse_solver(std::string_view name) {
    if (name == "direct") return Solver::direct;
    if (name == "iterative") return Solver::iterative;
    if (name == "hierarchical") return Solver::hierarchical;
    throw InvalidArgument("unknown solver: " + std::string(name));
}

DoompState::DoompState(const Dictionary& dict, const SampleSet& samples, const DnbsConfig& cfg)
    : dict_(&dict), samples_(&samples), cfg_(cfg), subspace_(dict.width(), dict.height()) {
    cfg.validate();
    samples.validate();
    if (samples.width() != dict.width() || samples.height() != dict.height()) {
        throw InvalidArgument("sample frame does not match the dictionary frame");
    }
    const double nb = static_cast<double>(samples.backgrounds.size());
    fg_weight_ = 1.0 / static_cast<double>(samples.foregrounds.size());
    bg_weight_ = nb > 0 ? cfg.lambda / nb : 0.0;

    d_.assign(dict.size(), 1.0);
    score_.assign(dict.size(), 0.0);
    chosen_.assign(dict.size(), 0);
    for (const Image& f : samples.foregrounds) residual_.push_back(f);
    for (const Image& b : samples.backgrounds) residual_.push_back(b);
    for (const Image& r : residual_) residual_ii_.emplace_back(r);
    alpha_.assign(residual_.size(), 0.0);
    shared_ii_.resize(2);
    shared_s_.resize(2, 0.0);
}

kernels::AtomView DoompState::atoms() const noexcept {
    const AtomTable& t = dict_->table();
    return {t.br.data(), t.bl.data(), t.tr.data(), t.tl.data(), t.inv_norm.data(), dict_->size()};
}

const Image& DoompState::shared_image() const {
    if (selected() == 0) throw std::logic_error("I_k is undefined before the first basis is selected");
    return shared_image_;
}

const IntegralImage& DoompState::shared_integral(std::size_t k) const {
    if (k < 2 || k >= shared_ii_.size()) throw std::logic_error("I_k requested for an unavailable k");
    return shared_ii_[k];
}

double DoompState::shared_scalar(std::size_t k) const {
    if (k < 2 || k >= shared_s_.size()) throw std::logic_error("S_k requested for an unavailable k");
    return shared_s_[k];
}

void DoompState::exclude(std::size_t atom) noexcept {
    d_[atom] = 0.0;
    score_[atom] = kernels::kExcluded;
}

void DoompState::commit(std::size_t atom) {
    subspace_.append((*dict_)[atom]);
    chosen_[atom] = 1;
    exclude(atom);

    const auto& k = kernels::active();
    const std::size_t last = subspace_.size() - 1;
    const Image& phi = subspace_.ortho(last);
    const double u = subspace_.ortho_norm2(last);
    previous_ = residual_;
    for (std::size_t j = 0; j < residual_.size(); ++j) {
        // <phi_bar, x> = <phi_bar, eps(x)> since phi_bar is orthogonal to the old span.
        alpha_[j] = k.dot(phi.data(), previous_[j].data(), phi.size());
        k.axpy(-alpha_[j] / u, phi.data(), residual_[j].data(), phi.size());
        residual_ii_[j] = IntegralImage(residual_[j]);
    }
    shared_image_ = precompute_Ik(*this);
    shared_ii_.emplace_back(shared_image_);
    shared_s_.push_back(precompute_Sk(*this));
}

Image precompute_Ik(const DoompState& state) {
    if (state.selected() == 0) throw std::logic_error("precompute_Ik called at k = 1");
    const auto& k = kernels::active();
    const auto& prev = state.previous_residuals();
    const auto& alpha = state.alphas();
    const std::size_t nf = state.foreground_count();
    const int w = state.subspace().width();
    const int h = state.subspace().height();
    Image fg(w, h), bg(w, h);
    for (std::size_t j = 0; j < prev.size(); ++j) {
        Image& acc = j < nf ? fg : bg;
        k.axpy(alpha[j], prev[j].data(), acc.data(), acc.size());
    }
    Image out(w, h);
    k.axpy(state.fg_weight(), fg.data(), out.data(), out.size());
    k.axpy(-state.bg_weight(), bg.data(), out.data(), out.size());
    return out;
}

double precompute_Sk(const DoompState& state) {
    if (state.selected() == 0) throw std::logic_error("precompute_Sk called at k = 1");
    const auto& alpha = state.alphas();
    const std::size_t nf = state.foreground_count();
    double fg = 0.0, bg = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) (j < nf ? fg : bg) += alpha[j] * alpha[j];
    return state.fg_weight() * fg - state.bg_weight() * bg;
}

double score_direct(const DoompState& state, std::size_t atom) {
    const double d = state.norms()[atom];
    if (!(d > state.config().dependence_tol) || state.is_selected(atom)) return kernels::kExcluded;
    const HaarBox& b = state.dictionary()[atom];
    const std::size_t nf = state.foreground_count();
    double fg = 0.0, bg = 0.0;
    const auto& ii = state.residual_integrals();
    for (std::size_t j = 0; j < ii.size(); ++j) {
        const double v = haar_dot_image(b, ii[j]);
        (j < nf ? fg : bg) += v * v;
    }
    return (state.fg_weight() * fg - state.bg_weight() * bg) / d;
}

ScoreUpdate score_iterative(const DoompState& state, std::size_t atom, double prev_norm, double prev_score) {
    const std::size_t k = state.selected() + 1;
    if (k < 2) throw std::logic_error("score_iterative needs at least one selected basis");
    const AtomTable& t = state.dictionary().table();
    const double* phi = state.subspace().ortho_integral(k - 2).data();
    const double* it = state.shared_integral(k).data();
    ScoreUpdate out{prev_norm, prev_score};
    kernels::iterative_update_one(phi[t.br[atom]], phi[t.bl[atom]], phi[t.tr[atom]], phi[t.tl[atom]],
                                  it[t.br[atom]], it[t.bl[atom]], it[t.tr[atom]], it[t.tl[atom]],
                                  t.inv_norm[atom], state.subspace().ortho_norm2(k - 2),
                                  state.shared_scalar(k), state.config().dependence_tol, out.norm,
                                  out.score);
    return out;
}

namespace detail {

void direct_rescore(DoompState& state) {
    const auto& k = kernels::active();
    const kernels::AtomView atoms = state.atoms();
    const std::size_t n = atoms.size;
    auto& d = state.norms();
    const bool update = state.selected() > 0;
    const std::size_t last = update ? state.selected() - 1 : 0;
    const double* phi = update ? state.subspace().ortho_integral(last).data() : nullptr;
    const double u = update ? state.subspace().ortho_norm2(last) : 1.0;
    const auto& ii = state.residual_integrals();
    const std::size_t nf = state.foreground_count();
    // Atom blocks small enough that the atom table and the sums stay in cache
    // while every sample passes over them. Results do not depend on the blocking;
    // a block with no backgrounds keeps bg at zero.
    constexpr std::size_t block = 4096;
    std::vector<double> fg(block), bg(block, 0.0);
    for (std::size_t b0 = 0; b0 < n; b0 += block) {
        const std::size_t m = std::min(n, b0 + block) - b0;
        const kernels::AtomView view{atoms.br + b0, atoms.bl + b0, atoms.tr + b0, atoms.tl + b0,
                                     atoms.inv_norm + b0, m};
        if (update) k.update_norms(view, phi, u, 0, m, d.data() + b0);
        for (std::size_t j = 0; j < ii.size(); ++j) {
            const bool first = j == 0 || j == nf;
            (first ? k.store_squares : k.accumulate_squares)(view, ii[j].data(), 0, m, j < nf ? fg.data() : bg.data());
        }
        k.finish_direct(fg.data(), bg.data(), d.data() + b0, state.fg_weight(), state.bg_weight(),
                        state.config().dependence_tol, 0, m, state.scores().data() + b0);
    }
}

bool try_commit(DoompState& state, SelectionResult& result, int k, std::size_t atom, double score,
                std::chrono::steady_clock::time_point started) {
    try {
        state.commit(atom);
    } catch (const LinearDependence&) {
        state.exclude(atom);
        return false;
    }
    result.atoms.push_back(atom);
    result.scores.push_back(score);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.trace.push_back(TraceRow{k, atom, state.dictionary()[atom], score, seconds});
    return true;
}

std::size_t pick_winner(const double* scores, std::size_t n, double tie_tol) {
    const std::size_t best = kernels::active().argmax(scores, n);
    if (best == n) return n;
    const double floor = scores[best] - tie_tol * std::abs(scores[best]);
    for (std::size_t i = 0; i < best; ++i) {
        if (scores[i] >= floor) return i;
    }
    return best;
}

bool commit_best(DoompState& state, SelectionResult& result, int k,
                 std::chrono::steady_clock::time_point started) {
    auto& scores = state.scores();
    for (;;) {
        const std::size_t best = pick_winner(scores.data(), scores.size(), state.config().tie_tol);
        if (best == scores.size()) return false;
        if (try_commit(state, result, k, best, scores[best], started)) return true;
    }
}

}  // namespace detail

namespace {

template <class Rescore>
SelectionResult run_greedy(const SampleSet& samples, const DnbsConfig& cfg, const Dictionary& dict,
                           Rescore rescore) {
    DoompState state(dict, samples, cfg);
    SelectionResult result{Subspace(dict.width(), dict.height())};
    for (int k = 1; k <= cfg.K; ++k) {
        const auto started = std::chrono::steady_clock::now();
        rescore(state, k);
        result.scored_candidates += dict.size();
        if (!detail::commit_best(state, result, k, started)) {
            result.status = SelectionStatus::early_stop;
            break;
        }
    }
    result.subspace = state.subspace();
    return result;
}

}  // namespace

SelectionResult select_direct(const SampleSet& samples, const DnbsConfig& cfg, const Dictionary& dict) {
    return run_greedy(samples, cfg, dict, [](DoompState& state, int) { detail::direct_rescore(state); });
}

SelectionResult select_iterative(const SampleSet& samples, const DnbsConfig& cfg, const Dictionary& dict) {
    return run_greedy(samples, cfg, dict, [](DoompState& state, int k) {
        if (k == 1) {
            detail::direct_rescore(state);
            return;
        }
        const auto& kern = kernels::active();
        const std::size_t last = state.selected() - 1;
        const kernels::AtomView atoms = state.atoms();
        kern.iterative_update(atoms, state.subspace().ortho_integral(last).data(),
                              state.shared_integral(static_cast<std::size_t>(k)).data(),
                              state.subspace().ortho_norm2(last), state.shared_scalar(static_cast<std::size_t>(k)),
                              state.config().dependence_tol, 0, atoms.size, state.norms().data(),
                              state.scores().data());
    });
}

double dnbs_objective(const Subspace& subspace, const SampleSet& samples, double lambda) {
    double fg = 0.0, bg = 0.0;
    for (const Image& f : samples.foregrounds) fg += squared_norm(subspace.residual(f));
    for (const Image& b : samples.backgrounds) bg += squared_norm(subspace.residual(b));
    const double value = fg / static_cast<double>(samples.foregrounds.size());
    if (samples.backgrounds.empty()) return value;
    return value - lambda * bg / static_cast<double>(samples.backgrounds.size());
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "k,atom,u0,v0,w,h,score,seconds\n";
    for (const TraceRow& r : trace) {
        out << fmt::format("{},{},{},{},{},{},{:.17g},{:.6f}\n", r.k, r.atom, r.box.u0, r.box.v0, r.box.w,
                           r.box.h, r.score, r.seconds);
    }
}

}  // namespace dnbs

#include "dnbs/cluster.hpp"

#include "dnbs/errors.hpp"
#include "dnbs/kernels.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>

namespace dnbs {

namespace {

void require_mu(double mu) {
    if (!(mu > 0.0 && mu <= 1.0)) throw InvalidArgument("mu must lie in (0, 1], got " + std::to_string(mu));
}

// Slack on real-valued bounds so rounding never drops a qualifying box; every
// enumerated box is re-tested exactly.
constexpr double kBoundSlack = 1e-9;

}  // namespace

void HierConfig::validate() const {
    if (!(ratio >= 0.0)) throw InvalidArgument("ratio must be >= 0");
    require_mu(mu);
}

std::vector<std::size_t> mu_near_set_bruteforce(const Dictionary& dict, std::size_t center, double mu,
                                                std::size_t* evaluations) {
    require_mu(mu);
    if (center >= dict.size()) throw InvalidArgument("center index out of range");
    const HaarBox& c = dict[center];
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dict.size(); ++i) {
        if (haar_dot_haar(dict[i], c) >= mu) out.push_back(i);
    }
    if (evaluations) *evaluations = dict.size();
    return out;
}

std::vector<std::size_t> mu_near_set_fast(const Dictionary& dict, std::size_t center, double mu,
                                          std::size_t* evaluations) {
    require_mu(mu);
    if (center >= dict.size()) throw InvalidArgument("center index out of range");
    const HaarBox& c = dict[center];
    const int W = dict.width(), H = dict.height();
    const double ac = static_cast<double>(c.area());
    const double mu2ac = mu * mu * ac;
    std::size_t evals = 0;
    std::vector<std::size_t> out;

    // A member psi meets c in a rectangle R inside c. <psi, c> >= mu needs
    // area(R) >= mu^2 area(c) and area(psi) <= area(R)^2 / (mu^2 area(c)).
    // psi can only stick out of R on sides where R touches c's border.
    for (int wi = 1; wi <= c.w; ++wi) {
        for (int hi = 1; hi <= c.h; ++hi) {
            const double ai = static_cast<double>(wi) * hi;
            if (ai < mu2ac * (1.0 - kBoundSlack)) continue;
            const double asup = ai * ai / mu2ac;
            const int wmax = static_cast<int>(std::min<double>(W, std::floor(asup / hi + kBoundSlack)));
            for (int xi = c.u0; xi + wi - 1 <= c.u1(); ++xi) {
                const int lmax = xi == c.u0 ? c.u0 - 1 : 0;
                const int rmax = xi + wi - 1 == c.u1() ? W - c.u1() : 0;
                for (int yi = c.v0; yi + hi - 1 <= c.v1(); ++yi) {
                    const int tmax = yi == c.v0 ? c.v0 - 1 : 0;
                    const int bmax = yi + hi - 1 == c.v1() ? H - c.v1() : 0;
                    for (int l = 0; l <= lmax && wi + l <= wmax; ++l) {
                        for (int r = 0; r <= rmax && wi + l + r <= wmax; ++r) {
                            const int w = wi + l + r;
                            const int hmax = static_cast<int>(std::min<double>(H, std::floor(asup / w + kBoundSlack)));
                            for (int t = 0; t <= tmax && hi + t <= hmax; ++t) {
                                for (int b = 0; b <= bmax && hi + t + b <= hmax; ++b) {
                                    const HaarBox psi{xi - l, yi - t, w, hi + t + b};
                                    if (psi == c) {  // <c, c> = 1 >= mu, no test needed
                                        out.push_back(center);
                                        continue;
                                    }
                                    ++evals;
                                    if (haar_dot_haar(psi, c) >= mu) out.push_back(dict.index_of(psi));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    if (evaluations) *evaluations = evals;
    return out;
}

ClusterIndex cluster_dictionary(const Dictionary& dict, double mu, std::uint64_t seed) {
    require_mu(mu);
    ClusterIndex index;
    index.mu = mu;
    index.seed = seed;
    index.width = dict.width();
    index.height = dict.height();

    const std::size_t n = dict.size();
    std::vector<std::size_t> pool(n), where(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = where[i] = i;
    std::mt19937_64 rng(seed);
    while (!pool.empty()) {
        const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
        Cluster cl;
        cl.center = pool[pick];
        for (std::size_t m : mu_near_set_fast(dict, cl.center, mu)) {
            if (where[m] == n) continue;  // taken by an earlier cluster
            cl.members.push_back(m);
            const std::size_t slot = where[m];
            pool[slot] = pool.back();
            where[pool[slot]] = slot;
            pool.pop_back();
            where[m] = n;
        }
        index.clusters.push_back(std::move(cl));
    }
    return index;
}

void ClusterIndex::validate(const Dictionary& dict) const {
    if (width != dict.width() || height != dict.height()) {
        throw InvalidArgument("cluster index was built for a " + std::to_string(width) + "x" +
                              std::to_string(height) + " dictionary");
    }
    std::vector<unsigned char> seen(dict.size(), 0);
    for (const Cluster& cl : clusters) {
        if (cl.center >= dict.size()) throw InvalidArgument("cluster center out of range");
        bool has_center = false;
        for (std::size_t m : cl.members) {
            if (m >= dict.size() || seen[m]) throw InvalidArgument("clusters do not partition the dictionary");
            seen[m] = 1;
            has_center = has_center || m == cl.center;
            if (!(haar_dot_haar(dict[m], dict[cl.center]) >= mu)) {
                throw InvalidArgument("cluster member violates the mu bound");
            }
        }
        if (!has_center) throw InvalidArgument("cluster does not contain its center");
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw InvalidArgument("clusters do not cover the dictionary");
    }
}

namespace {

// Brings (d_i, L_i) of single atoms up to the current step by replaying the
// rank-one updates they missed. Uses the same kernels as the full sweeps, so
// a refreshed value is bit-identical to what select_iterative computes.
class LazyScores {
public:
    explicit LazyScores(DoompState& state) : state_(state), stamp_(state.dictionary().size(), 0) {
        for (const Image& f : state.samples().foregrounds) original_.emplace_back(f);
        for (const Image& b : state.samples().backgrounds) original_.emplace_back(b);
    }

    /// Full first-step sweep; every atom becomes current at k = 1.
    void score_all_first() {
        detail::direct_rescore(state_);
        std::fill(stamp_.begin(), stamp_.end(), 1);
    }

    void refresh(std::size_t i, std::size_t k) {
        auto& d = state_.norms();
        auto& score = state_.scores();
        std::size_t& at = stamp_[i];
        if (at == 0) {
            // First-step score from the untouched samples, d = 1. Same operation
            // order as the accumulate_squares / finish_direct kernels.
            const AtomTable& t = state_.dictionary().table();
            const std::size_t nf = state_.foreground_count();
            double fg = 0.0, bg = 0.0;
            for (std::size_t j = 0; j < original_.size(); ++j) {
                const double* x = original_[j].data();
                const double v = (x[t.br[i]] - x[t.bl[i]] - x[t.tr[i]] + x[t.tl[i]]) * t.inv_norm[i];
                (j < nf ? fg : bg) += v * v;
            }
            const double num = state_.fg_weight() * fg - state_.bg_weight() * bg;
            score[i] = d[i] > state_.config().dependence_tol ? num / d[i] : kernels::kExcluded;
            at = 1;
        }
        const auto& kern = kernels::active();
        const kernels::AtomView atoms = state_.atoms();
        const Subspace& s = state_.subspace();
        for (; at < k; ++at) {
            const std::size_t step = at + 1;
            kern.iterative_update(atoms, s.ortho_integral(step - 2).data(),
                                  state_.shared_integral(step).data(), s.ortho_norm2(step - 2),
                                  state_.shared_scalar(step), state_.config().dependence_tol, i, i + 1,
                                  d.data(), score.data());
        }
    }

private:
    DoompState& state_;
    std::vector<std::size_t> stamp_;
    std::vector<IntegralImage> original_;
};

}  // namespace

SelectionResult select_hierarchical(const SampleSet& samples, const DnbsConfig& cfg, const HierConfig& hier,
                                    const ClusterIndex& index, const Dictionary& dict) {
    hier.validate();
    if (index.width != dict.width() || index.height != dict.height()) {
        throw InvalidArgument("cluster index does not match the dictionary frame");
    }
    DoompState state(dict, samples, cfg);
    LazyScores lazy(state);
    SelectionResult result{Subspace(dict.width(), dict.height())};
    const auto& scores = state.scores();
    std::vector<std::size_t> near;
    std::vector<unsigned char> in_pool(dict.size(), 0);
    std::vector<std::size_t> pool;

    for (int k = 1; k <= cfg.K; ++k) {
        const auto started = std::chrono::steady_clock::now();
        const auto step = static_cast<std::size_t>(k);
        pool.clear();
        auto add = [&](std::size_t i) {
            if (in_pool[i]) return;
            in_pool[i] = 1;
            lazy.refresh(i, step);
            pool.push_back(i);
        };

        if (k == 1) {
            // The first basis is chosen by brute force over the whole dictionary.
            lazy.score_all_first();
            for (std::size_t i = 0; i < dict.size(); ++i) add(i);
        }
        double best_center = kernels::kExcluded;
        for (const Cluster& cl : index.clusters) {
            if (k == 1) break;
            add(cl.center);
            best_center = std::max(best_center, scores[cl.center]);
        }
        const bool none_alive = best_center == kernels::kExcluded;
        const double cut = best_center - hier.ratio * std::abs(best_center);
        for (const Cluster& cl : index.clusters) {
            if (k == 1) break;
            const double sc = scores[cl.center];
            // The best cluster is always opened (ratio = 0 would otherwise open
            // nothing), and so is any cluster whose center can no longer be scored.
            const bool open = none_alive || sc == kernels::kExcluded || sc > cut || sc == best_center;
            if (!open) continue;
            if (hier.expand_full_near_set) {
                near = mu_near_set_fast(dict, cl.center, index.mu);
                for (std::size_t m : near) add(m);
            } else {
                for (std::size_t m : cl.members) add(m);
            }
        }
        result.scored_candidates += pool.size();

        std::sort(pool.begin(), pool.end());
        bool committed = false;
        while (!committed) {
            double top = kernels::kExcluded;
            for (std::size_t i : pool) {
                if (scores[i] > top) top = scores[i];
            }
            if (top == kernels::kExcluded) break;
            const double floor = top - cfg.tie_tol * std::abs(top);
            std::size_t winner = pool.front();
            for (std::size_t i : pool) {
                if (scores[i] >= floor) {
                    winner = i;
                    break;
                }
            }
            committed = detail::try_commit(state, result, k, winner, scores[winner], started);
        }
        for (std::size_t i : pool) in_pool[i] = 0;
        if (!committed) {
            result.status = SelectionStatus::early_stop;
            break;
        }
    }
    result.subspace = state.subspace();
    return result;
}

void save_cluster_index(const ClusterIndex& index, const std::filesystem::path& path) {
    nlohmann::json j;
    j["mu"] = index.mu;
    j["seed"] = index.seed;
    j["width"] = index.width;
    j["height"] = index.height;
    auto& clusters = j["clusters"] = nlohmann::json::array();
    for (const Cluster& cl : index.clusters) clusters.push_back({{"center", cl.center}, {"members", cl.members}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump() << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

ClusterIndex load_cluster_index(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    ClusterIndex index;
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        index.mu = j.at("mu").get<double>();
        index.seed = j.at("seed").get<std::uint64_t>();
        index.width = j.at("width").get<int>();
        index.height = j.at("height").get<int>();
        for (const auto& c : j.at("clusters")) {
            index.clusters.push_back(
                Cluster{c.at("center").get<std::size_t>(), c.at("members").get<std::vector<std::size_t>>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    require_mu(index.mu);
    return index;
}

}  // namespace dnbs

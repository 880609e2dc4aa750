#include "wvs/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

#include "wvs/errors.hpp"
#include "wvs/logspace.hpp"
#include "wvs/rng.hpp"

namespace wvs {
namespace {

constexpr double kSumTolerance = 1e-12;

void check_probability_vector(std::span<const double> p, const std::string& what) {
    if (p.empty()) throw DomainError(what + ": empty probability vector");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || p[i] < 0.0) {
            std::ostringstream msg;
            msg << what << ": entry " << i << " = " << p[i] << " is not a probability";
            throw DomainError(msg.str());
        }
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": entries sum to " << sum << ", expected 1";
        throw DomainError(msg.str());
    }
}

void require_kind(SourceKind have, SourceKind want, const char* accessor) {
    if (have != want) throw DomainError(std::string(accessor) + " called on wrong model kind");
}

std::vector<double> propagate(std::span<const double> dist, const Matrix& p) {
    std::vector<double> out(dist.size(), 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] == 0.0) continue;
        for (std::size_t j = 0; j < dist.size(); ++j) out[j] += dist[i] * p[i][j];
    }
    return out;
}

// Probability of the tuple given X_1 ~ dist, for a markov chain.
double markov_tuple_probability(std::span<const double> dist, const Matrix& p,
                                std::span<const Symbol> tuple) {
    double prob = dist[tuple[0]];
    for (std::size_t i = 1; i < tuple.size() && prob > 0.0; ++i) prob *= p[tuple[i - 1]][tuple[i]];
    return prob;
}

double iid_tuple_probability(std::span<const double> dist, std::span<const Symbol> tuple) {
    double prob = 1.0;
    for (Symbol a : tuple) prob *= dist[a];
    return prob;
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
}

void fnv_mix_vector(std::uint64_t& h, std::span<const double> v) {
    const std::uint64_t n = v.size();
    fnv_mix(h, &n, sizeof n);
    fnv_mix(h, v.data(), v.size() * sizeof(double));
}

}  // namespace

SourceModel SourceModel::iid(std::vector<double> dist) {
    if (dist.size() < 2) throw DomainError("iid: alphabet must have at least 2 symbols");
    check_probability_vector(dist, "iid.dist");
    SourceModel m;
    m.kind_ = SourceKind::iid;
    m.alphabet_size_ = dist.size();
    m.dist_ = std::move(dist);
    m.build_log_table();
    return m;
}

SourceModel SourceModel::markov(Matrix transitions, std::vector<double> initial) {
    const std::size_t k = initial.size();
    if (k < 2) throw DomainError("markov: alphabet must have at least 2 symbols");
    check_probability_vector(initial, "markov.init");
    if (transitions.size() != k)
        throw DomainError("markov.P: expected " + std::to_string(k) + " rows");
    for (std::size_t i = 0; i < k; ++i) {
        if (transitions[i].size() != k)
            throw DomainError("markov.P[" + std::to_string(i) + "]: expected " +
                              std::to_string(k) + " columns");
        check_probability_vector(transitions[i], "markov.P[" + std::to_string(i) + "]");
    }
    SourceModel m;
    m.kind_ = SourceKind::markov;
    m.alphabet_size_ = k;
    m.transitions_ = std::move(transitions);
    m.initial_ = std::move(initial);
    m.build_log_table();
    return m;
}

SourceModel SourceModel::mixture(std::vector<double> weights, std::vector<SourceModel> components) {
    if (components.empty()) throw DomainError("mixture: needs at least one component");
    if (weights.size() != components.size())
        throw DomainError("mixture: weights and components differ in length");
    check_probability_vector(weights, "mixture.weights");
    const std::size_t k = components.front().alphabet_size();
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        const std::string where = "mixture.components[" + std::to_string(c) + "]";
        if (comp.kind() == SourceKind::mixture) throw DomainError(where + ": nested mixture");
        if (comp.alphabet_size() != k) throw DomainError(where + ": alphabet size mismatch");
        if (comp.kind() == SourceKind::markov) {
            if (!markov::is_irreducible(comp.transitions()))
                throw DomainError(where + ": markov component is not irreducible");
            if (markov::period(comp.transitions()) != 1)
                throw DomainError(where + ": markov component is periodic");
        }
    }
    SourceModel m;
    m.kind_ = SourceKind::mixture;
    m.alphabet_size_ = k;
    m.weights_ = std::move(weights);
    m.components_ = std::move(components);
    return m;
}

const std::vector<double>& SourceModel::distribution() const {
    require_kind(kind_, SourceKind::iid, "distribution()");
    return dist_;
}
const Matrix& SourceModel::transitions() const {
    require_kind(kind_, SourceKind::markov, "transitions()");
    return transitions_;
}
const std::vector<double>& SourceModel::initial() const {
    require_kind(kind_, SourceKind::markov, "initial()");
    return initial_;
}
const std::vector<double>& SourceModel::weights() const {
    require_kind(kind_, SourceKind::mixture, "weights()");
    return weights_;
}
const std::vector<SourceModel>& SourceModel::components() const {
    require_kind(kind_, SourceKind::mixture, "components()");
    return components_;
}

std::size_t SourceModel::chain_states() const {
    switch (kind_) {
        case SourceKind::iid: return 1;
        case SourceKind::markov: return alphabet_size_ + 1;
        case SourceKind::mixture: break;
    }
    throw DomainError("chain view is undefined for mixtures; use its components");
}

void SourceModel::build_log_table() {
    const std::size_t k = alphabet_size_;
    if (kind_ == SourceKind::iid) {
        log_table_.resize(k);
        for (std::size_t a = 0; a < k; ++a) log_table_[a] = safe_log(dist_[a]);
        return;
    }
    log_table_.resize((k + 1) * k);
    for (std::size_t a = 0; a < k; ++a) log_table_[a] = safe_log(initial_[a]);
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t a = 0; a < k; ++a)
            log_table_[(s + 1) * k + a] = safe_log(transitions_[s][a]);
}

std::uint64_t SourceModel::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto tag = static_cast<std::uint32_t>(kind_);
    fnv_mix(h, &tag, sizeof tag);
    switch (kind_) {
        case SourceKind::iid: fnv_mix_vector(h, dist_); break;
        case SourceKind::markov:
            for (const auto& row : transitions_) fnv_mix_vector(h, row);
            fnv_mix_vector(h, initial_);
            break;
        case SourceKind::mixture:
            fnv_mix_vector(h, weights_);
            for (const auto& c : components_) {
                const std::uint64_t sub = c.fingerprint();
                fnv_mix(h, &sub, sizeof sub);
            }
            break;
    }
    return h;
}

bool SourceModel::operator==(const SourceModel& other) const {
    return kind_ == other.kind_ && alphabet_size_ == other.alphabet_size_ &&
           dist_ == other.dist_ && transitions_ == other.transitions_ &&
           initial_ == other.initial_ && weights_ == other.weights_ &&
           components_ == other.components_;
}

namespace markov {

std::vector<double> stationary_distribution(const Matrix& p) {
    const std::size_t k = p.size();
    // Rows 0..k-2 of (P^T - I), last row replaced by the normalisation constraint.
    Matrix a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i + 1 < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[i][j] = p[j][i] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < k; ++j) a[k - 1][j] = 1.0;
    a[k - 1][k] = 1.0;

    bool singular = false;
    for (std::size_t col = 0; col < k && !singular; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-13) {
            singular = true;
            break;
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col || a[r][col] == 0.0) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    if (!singular) {
        std::vector<double> pi(k);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            pi[i] = std::max(0.0, a[i][k] / a[i][i]);
            sum += pi[i];
        }
        for (double& v : pi) v /= sum;
        return pi;
    }

    // Lazy chain (P + I)/2 shares the stationary law and is aperiodic.
    std::vector<double> pi(k, 1.0 / static_cast<double>(k));
    for (int iter = 0; iter < 1'000'000; ++iter) {
        std::vector<double> next = propagate(pi, p);
        double delta = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            next[i] = 0.5 * (next[i] + pi[i]);
            delta = std::max(delta, std::abs(next[i] - pi[i]));
        }
        pi = std::move(next);
        if (delta < 1e-12) break;
    }
    return pi;
}

bool is_irreducible(const Matrix& p) {
    const std::size_t k = p.size();
    auto reaches_all = [&](bool transpose) {
        std::vector<bool> seen(k, false);
        std::queue<std::size_t> todo;
        todo.push(0);
        seen[0] = true;
        while (!todo.empty()) {
            const std::size_t u = todo.front();
            todo.pop();
            for (std::size_t v = 0; v < k; ++v) {
                const double w = transpose ? p[v][u] : p[u][v];
                if (w > 0.0 && !seen[v]) {
                    seen[v] = true;
                    todo.push(v);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    return reaches_all(false) && reaches_all(true);
}

std::size_t period(const Matrix& p) {
    const std::size_t k = p.size();
    std::vector<long> level(k, -1);
    std::queue<std::size_t> todo;
    level[0] = 0;
    todo.push(0);
    while (!todo.empty()) {
        const std::size_t u = todo.front();
        todo.pop();
        for (std::size_t v = 0; v < k; ++v) {
            if (p[u][v] > 0.0 && level[v] < 0) {
                level[v] = level[u] + 1;
                todo.push(v);
            }
        }
    }
    long g = 0;
    for (std::size_t u = 0; u < k; ++u) {
        if (level[u] < 0) continue;
        for (std::size_t v = 0; v < k; ++v) {
            if (p[u][v] > 0.0 && level[v] >= 0) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
        }
    }
    return g == 0 ? 1 : static_cast<std::size_t>(g);
}

}  // namespace markov

double cylinder_log_probability(const SourceModel& model, std::span<const Symbol> tuple) {
    if (tuple.empty()) throw DomainError("cylinder_log_probability: empty tuple");
    check_alphabet(tuple, model.alphabet_size(), "cylinder_log_probability");
    if (model.kind() == SourceKind::mixture) {
        const auto& comps = model.components();
        const auto& w = model.weights();
        std::vector<double> terms(comps.size(), kNegInf);
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (w[c] > 0.0) terms[c] = std::log(w[c]) + cylinder_log_probability(comps[c], tuple);
        }
        return std::min(log_sum_exp(terms), 0.0);
    }
    double lp = 0.0;
    std::size_t state = 0;
    for (Symbol a : tuple) {
        lp += model.log_transition(state, a);
        if (lp == kNegInf) return kNegInf;
        state = model.next_state(state, a);
    }
    return lp;
}

PathSample sample_path(const SourceModel& model, std::size_t length, std::uint64_t seed) {
    if (length == 0) throw DomainError("sample_path: length must be at least 1");
    Rng rng(seed);
    PathSample out;
    out.seed = seed;
    out.model_id = model.fingerprint();
    const SourceModel* active = &model;
    if (model.kind() == SourceKind::mixture) {
        out.component = draw_index(rng, model.weights());
        active = &model.components()[out.component];
    }
    out.symbols.resize(length);
    if (active->kind() == SourceKind::iid) {
        const auto& d = active->distribution();
        for (auto& s : out.symbols) s = static_cast<Symbol>(draw_index(rng, d));
    } else {
        const auto& p = active->transitions();
        Symbol prev = static_cast<Symbol>(draw_index(rng, active->initial()));
        out.symbols[0] = prev;
        for (std::size_t i = 1; i < length; ++i) {
            prev = static_cast<Symbol>(draw_index(rng, p[prev]));
            out.symbols[i] = prev;
        }
    }
    return out;
}

std::vector<double> shifted_cylinder_series(const SourceModel& model,
                                            std::span<const Symbol> tuple, std::size_t count) {
    if (tuple.empty()) throw DomainError("shifted cylinder: empty tuple");
    check_alphabet(tuple, model.alphabet_size(), "shifted cylinder");
    if (count > kMaxShift)
        throw RangeError("shifted cylinder: horizon " + std::to_string(count) +
                         " exceeds configured maximum " + std::to_string(kMaxShift));
    std::vector<double> out(count, 0.0);
    switch (model.kind()) {
        case SourceKind::iid: {
            const double p = iid_tuple_probability(model.distribution(), tuple);
            std::fill(out.begin(), out.end(), p);
            break;
        }
        case SourceKind::markov: {
            std::vector<double> dist = model.initial();
            for (std::size_t i = 0; i < count; ++i) {
                out[i] = markov_tuple_probability(dist, model.transitions(), tuple);
                if (i + 1 < count) dist = propagate(dist, model.transitions());
            }
            break;
        }
        case SourceKind::mixture: {
            const auto& w = model.weights();
            for (std::size_t c = 0; c < w.size(); ++c) {
                const auto part = shifted_cylinder_series(model.components()[c], tuple, count);
                for (std::size_t i = 0; i < count; ++i) out[i] += w[c] * part[i];
            }
            break;
        }
    }
    return out;
}

double shifted_cylinder_probability(const SourceModel& model, std::span<const Symbol> tuple,
                                    std::size_t shift) {
    if (shift >= kMaxShift)
        throw RangeError("shifted_cylinder_probability: shift " + std::to_string(shift) +
                         " exceeds configured maximum " + std::to_string(kMaxShift - 1));
    return shifted_cylinder_series(model, tuple, shift + 1).back();
}

double cesaro_cylinder_average(const SourceModel& model, std::span<const Symbol> tuple,
                               std::size_t horizon) {
    if (horizon == 0) throw DomainError("cesaro_cylinder_average: horizon must be at least 1");
    const auto series = shifted_cylinder_series(model, tuple, horizon);
    double sum = 0.0;
    for (double v : series) sum += v;
    return sum / static_cast<double>(horizon);
}

std::vector<WeightedComponent> ergodic_components(const SourceModel& model) {
    switch (model.kind()) {
        case SourceKind::iid: return {{1.0, model}};
        case SourceKind::markov: {
            const auto& p = model.transitions();
            if (!markov::is_irreducible(p))
                throw UnsupportedError(
                    "ergodic_components: markov chain is reducible; its decomposition is not "
                    "a single ergodic component");
            if (const auto d = markov::period(p); d != 1)
                throw UnsupportedError("ergodic_components: markov chain is periodic (period " +
                                       std::to_string(d) + "); aperiodicity is required");
            return {{1.0, SourceModel::markov(p, markov::stationary_distribution(p))}};
        }
        case SourceKind::mixture: {
            std::vector<WeightedComponent> out;
            for (std::size_t c = 0; c < model.components().size(); ++c) {
                out.push_back({model.weights()[c],
                               ergodic_components(model.components()[c]).front().model});
            }
            return out;
        }
    }
    return {};
}

std::vector<double> stationary_marginal(const SourceModel& model) {
    switch (model.kind()) {
        case SourceKind::iid: return model.distribution();
        case SourceKind::markov:
            if (!markov::is_irreducible(model.transitions()))
                throw UnsupportedError("stationary_marginal: markov chain is reducible");
            return markov::stationary_distribution(model.transitions());
        case SourceKind::mixture: break;
    }
    throw DomainError("stationary_marginal: mixtures have one marginal per component");
}

double entropy_rate_exact(const SourceModel& model) {
    switch (model.kind()) {
        case SourceKind::iid: {
            double h = 0.0;
            for (double p : model.distribution()) h += entropy_term_bits(p);
            return h;
        }
        case SourceKind::markov: {
            const auto& p = model.transitions();
            if (!markov::is_irreducible(p))
                throw UnsupportedError("entropy_rate_exact: markov chain is reducible");
            const auto pi = markov::stationary_distribution(p);
            double h = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                double row = 0.0;
                for (double v : p[i]) row += entropy_term_bits(v);
                h += pi[i] * row;
            }
            return h;
        }
        case SourceKind::mixture: {
            double h = 0.0;
            for (std::size_t c = 0; c < model.components().size(); ++c)
                h += model.weights()[c] * entropy_rate_exact(model.components()[c]);
            return h;
        }
    }
    return 0.0;
}

PrefixLikelihood::PrefixLikelihood(const SourceModel& model) : model_(&model) {
    if (model.kind() == SourceKind::mixture) {
        for (std::size_t c = 0; c < model.components().size(); ++c) {
            parts_.push_back(&model.components()[c]);
            log_weights_.push_back(safe_log(model.weights()[c]));
        }
    } else {
        parts_.push_back(&model);
        log_weights_.push_back(0.0);
    }
    running_.assign(parts_.size(), 0.0);
    states_.assign(parts_.size(), 0);
}

void PrefixLikelihood::push(Symbol a) {
    if (a >= model_->alphabet_size())
        throw DomainError("PrefixLikelihood: symbol " + std::to_string(a) + " outside alphabet");
    for (std::size_t c = 0; c < parts_.size(); ++c) {
        if (running_[c] == kNegInf) continue;
        running_[c] += parts_[c]->log_transition(states_[c], a);
        states_[c] = parts_[c]->next_state(states_[c], a);
    }
    ++length_;
}

double PrefixLikelihood::log_probability() const {
    if (parts_.size() == 1) return running_[0];
    std::vector<double> terms(parts_.size());
    for (std::size_t c = 0; c < parts_.size(); ++c) terms[c] = log_weights_[c] + running_[c];
    return std::min(log_sum_exp(terms), 0.0);
}

}  // namespace wvs

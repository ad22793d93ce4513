#include "cgid/witness.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>

#include "cgid/error.hpp"

namespace cgid {

namespace {

constexpr double kSecondFloor = 0.005;
constexpr double kGapMargin = 0.01;
constexpr double kMismatchPenalty = 10.0;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Every probability row of a model, latents first, then CPT rows.
std::vector<std::vector<double>*> rows_of(DiscreteSEM& m) {
    std::vector<std::vector<double>*> out;
    for (auto& lat : m.latents) out.push_back(&lat.marginal);
    for (auto& cpt : m.cpts) {
        for (auto& row : cpt.rows) out.push_back(&row);
    }
    return out;
}

// p = floor + (1 − card · floor) · softmax(θ) for each row.
void write_rows(const Eigen::VectorXd& theta, const std::vector<std::vector<double>*>& rows) {
    Eigen::Index k = 0;
    for (auto* row : rows) {
        const std::size_t card = row->size();
        double top = -INFINITY;
        for (std::size_t j = 0; j < card; ++j) top = std::max(top, theta[k + static_cast<Eigen::Index>(j)]);
        double sum = 0.0;
        for (std::size_t j = 0; j < card; ++j) {
            (*row)[j] = std::exp(theta[k + static_cast<Eigen::Index>(j)] - top);
            sum += (*row)[j];
        }
        const double scale = 1.0 - static_cast<double>(card) * kSecondFloor;
        for (std::size_t j = 0; j < card; ++j) (*row)[j] = kSecondFloor + scale * (*row)[j] / sum;
        k += static_cast<Eigen::Index>(card);
    }
}

Eigen::VectorXd read_rows(const std::vector<std::vector<double>*>& rows) {
    Eigen::Index n = 0;
    for (auto* row : rows) n += static_cast<Eigen::Index>(row->size());
    Eigen::VectorXd theta(n);
    Eigen::Index k = 0;
    for (auto* row : rows) {
        const double scale = 1.0 - static_cast<double>(row->size()) * kSecondFloor;
        for (double p : *row) theta[k++] = std::log(std::max((p - kSecondFloor) / scale, 1e-6));
    }
    return theta;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

using Clock = std::chrono::steady_clock;

struct Search {
    const CausalGraph& g;
    const QSpec& spec;
    const ConditionalQuery& q;
    const WitnessOptions& options;
    Clock::time_point deadline;

    std::optional<ModelPair> restart(std::size_t r) const;
};

std::optional<ModelPair> Search::restart(std::size_t r) const {
    const std::uint64_t seed = splitmix(options.seed ^ splitmix(r + 1));
    std::mt19937_64 rng(seed);
    const std::size_t budget = options.state_budget;
    const DiscreteSEM first = random_model(g, seed, 2, options.latent_card);

    std::vector<std::vector<double>> q1;
    for (const auto& entry : spec.entries) q1.push_back(q_eval(first, entry.set, budget).values);
    const DistTable fam1 = interventional_family(first, q.x, q.y, q.z, budget);

    DiscreteSEM second = first;
    const auto rows = rows_of(second);
    Eigen::VectorXd theta = read_rows(rows);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] += noise(rng);

    auto mismatch_of = [&]() {
        double worst = 0.0;
        for (std::size_t i = 0; i < spec.entries.size(); ++i)
            worst = std::max(worst, max_abs_diff(q_eval(second, spec.entries[i].set, budget).values, q1[i]));
        return worst;
    };
    // Largest target disagreement and where it occurs.
    auto gap_of = [&](std::size_t* where, double* sign) {
        const DistTable fam2 = interventional_family(second, q.x, q.y, q.z, budget);
        double best = -1.0;
        for (std::size_t i = 0; i < fam2.values.size(); ++i) {
            const double d = fam2.values[i] - fam1.values[i];
            if (std::abs(d) > best) {
                best = std::abs(d);
                if (where) *where = i;
                if (sign) *sign = d < 0 ? -1.0 : 1.0;
            }
        }
        return best;
    };
    auto score = [&](const Eigen::VectorXd& t) {
        write_rows(t, rows);
        return gap_of(nullptr, nullptr) - kMismatchPenalty * mismatch_of();
    };

    double current = score(theta);
    double sigma = 0.5;
    std::uniform_int_distribution<Eigen::Index> coord(0, theta.size() - 1);
    for (int step = 0; step < options.hill_steps; ++step) {
        Eigen::VectorXd trial = theta;
        trial[coord(rng)] += sigma * noise(rng);
        trial[coord(rng)] += sigma * noise(rng);
        const double s = score(trial);
        if (s > current) {
            theta = trial;
            current = s;
            sigma = std::min(sigma * 1.2, 2.0);
        } else {
            sigma = std::max(sigma * 0.95, 0.02);
        }
    }

    write_rows(theta, rows);
    std::size_t where = 0;
    double sign = 1.0;
    gap_of(&where, &sign);
    std::vector<int> digits(fam1.domain.vars().size());
    fam1.domain.decode(where, digits);
    Assignment x_value;
    Assignment yz_value;
    for (std::size_t k = 0; k < digits.size(); ++k) {
        const NodeId& name = fam1.domain.vars()[k];
        (q.x.count(name) ? x_value : yz_value)[name] = digits[k];
    }
    const double target1 = fam1.values[where];
    const double wanted = options.min_gap + kGapMargin;

    std::size_t q_size = 0;
    for (const auto& t : q1) q_size += t.size();
    const Eigen::Index m = static_cast<Eigen::Index>(q_size + 1);
    auto residuals = [&](const Eigen::VectorXd& t) {
        write_rows(t, rows);
        Eigen::VectorXd out(m);
        Eigen::Index k = 0;
        for (std::size_t i = 0; i < spec.entries.size(); ++i) {
            const auto values = q_eval(second, spec.entries[i].set, budget).values;
            for (std::size_t j = 0; j < values.size(); ++j) out[k++] = values[j] - q1[i][j];
        }
        const double target2 = interventional(second, x_value, q.y, q.z, budget).at(yz_value);
        out[k] = std::min(0.0, sign * (target2 - target1) - wanted);
        return out;
    };

    Eigen::VectorXd res = residuals(theta);
    double cost = 0.5 * res.squaredNorm();
    double mu = 1e-3;
    const double h = 1e-7;
    for (int it = 0; it < options.lm_iterations; ++it) {
        if (Clock::now() > deadline) return std::nullopt;
        if (res.head(m - 1).cwiseAbs().maxCoeff() <= options.agreement_tolerance * 1e-3 && res[m - 1] == 0.0) break;
        Eigen::MatrixXd jac(m, theta.size());
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            Eigen::VectorXd t = theta;
            t[k] += h;
            jac.col(k) = (residuals(t) - res) / h;
        }
        const Eigen::MatrixXd a = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * res;
        bool moved = false;
        while (mu < 1e10) {
            Eigen::MatrixXd damped = a;
            damped.diagonal().array() += mu;
            const Eigen::VectorXd delta = damped.ldlt().solve(-grad);
            const Eigen::VectorXd next = theta + delta;
            const Eigen::VectorXd r_next = residuals(next);
            const double c_next = 0.5 * r_next.squaredNorm();
            if (c_next < cost) {
                theta = next;
                res = r_next;
                cost = c_next;
                mu = std::max(mu / 3.0, 1e-12);
                moved = true;
                break;
            }
            mu *= 4.0;
        }
        if (!moved) break;
    }

    write_rows(theta, rows);
    if (!second.check(true).empty()) return std::nullopt;
    WitnessCheck check = check_witness(first, second, spec, q, budget);
    if (check.input_mismatch > options.agreement_tolerance || check.gap < options.min_gap) return std::nullopt;
    return ModelPair{first, second, std::move(check), r};
}

}  // namespace

WitnessCheck check_witness(const DiscreteSEM& first, const DiscreteSEM& second, const QSpec& spec,
                           const ConditionalQuery& q, std::size_t budget) {
    if (first.graph != second.graph) throw PreconditionError("witness models have different graphs");
    spec.validate(first.graph);
    q.validate(first.graph);
    WitnessCheck out;
    for (const auto& entry : spec.entries) {
        out.input_mismatch = std::max(
            out.input_mismatch, max_abs_diff(q_eval(first, entry.set, budget).values, q_eval(second, entry.set, budget).values));
    }
    const DistTable f1 = interventional_family(first, q.x, q.y, q.z, budget);
    const DistTable f2 = interventional_family(second, q.x, q.y, q.z, budget);
    if (f1.domain.vars() != f2.domain.vars() || f1.domain.cards() != f2.domain.cards())
        throw PreconditionError("witness models have different domains");
    std::size_t where = 0;
    for (std::size_t i = 0; i < f1.values.size(); ++i) {
        const double d = std::abs(f1.values[i] - f2.values[i]);
        if (d > out.gap) {
            out.gap = d;
            where = i;
        }
    }
    std::vector<int> digits(f1.domain.vars().size());
    f1.domain.decode(where, digits);
    for (std::size_t k = 0; k < digits.size(); ++k) out.realization[f1.domain.vars()[k]] = digits[k];
    out.target_first = f1.values[where];
    out.target_second = f2.values[where];
    return out;
}

std::optional<ModelPair> witness_search(const CausalGraph& g, const QSpec& spec, const ConditionalQuery& q,
                                        const WitnessOptions& options) {
    spec.validate(g);
    q.validate(g);
    if (options.threads < 1) throw PreconditionError("threads must be positive");
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(options.time_limit_seconds));
    const Search search{g, spec, q, options, deadline};
    const std::size_t batch = static_cast<std::size_t>(options.threads);
    for (std::size_t first = 0; first < options.restarts; first += batch) {
        if (Clock::now() > deadline) break;
        const std::size_t last = std::min(options.restarts, first + batch);
        std::vector<std::optional<ModelPair>> found(last - first);
        if (batch == 1) {
            found[0] = search.restart(first);
        } else {
            std::vector<std::future<std::optional<ModelPair>>> jobs;
            for (std::size_t r = first; r < last; ++r)
                jobs.push_back(std::async(std::launch::async, [&search, r] { return search.restart(r); }));
            for (std::size_t k = 0; k < jobs.size(); ++k) found[k] = jobs[k].get();
        }
        for (auto& f : found) {
            if (f) return f;
        }
    }
    return std::nullopt;
}

}  // namespace cgid

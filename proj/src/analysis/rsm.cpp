#include "vardislab/analysis/rsm.hpp"

#include "vardislab/analysis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vardislab::analysis {

namespace {

constexpr std::size_t max_factors = 20;

int level(std::size_t m, std::size_t i) { return ((m >> i) & 1U) ? 1 : -1; }

}  // namespace

double RegressionModel::linear(std::size_t i) const {
    if (i >= k) throw AnalysisError(AnalysisErrc::InvalidArgument, "factor index out of range");
    return terms[i].coefficient;
}

double RegressionModel::interaction(std::size_t i, std::size_t j) const {
    if (i == j || i >= k || j >= k) {
        throw AnalysisError(AnalysisErrc::InvalidArgument, "interaction index out of range");
    }
    if (i > j) std::swap(i, j);
    for (std::size_t t = k; t < terms.size(); ++t) {
        if (terms[t].factors[0] == i && terms[t].factors[1] == j) return terms[t].coefficient;
    }
    return 0.0;
}

double RegressionModel::predict(std::span<const int> x) const {
    if (x.size() != k) throw AnalysisError(AnalysisErrc::InvalidArgument, "wrong factor count");
    double y = intercept;
    for (const auto& t : terms) {
        double prod = t.coefficient;
        for (auto f : t.factors) prod *= x[f];
        y += prod;
    }
    return y;
}

double RegressionModel::interaction_contribution_pct() const {
    double sum = 0.0;
    for (std::size_t t = k; t < terms.size(); ++t) sum += terms[t].contribution_pct;
    return sum;
}

RegressionModel rsm_fit(std::size_t k, std::span<const double> responses) {
    if (k == 0 || k > max_factors) {
        throw AnalysisError(AnalysisErrc::IncompleteDesign, "factor count must be 1..20");
    }
    const std::size_t cells = std::size_t{1} << k;
    if (responses.size() != cells) {
        throw AnalysisError(AnalysisErrc::IncompleteDesign,
                            "expected " + std::to_string(cells) + " responses, got " +
                                std::to_string(responses.size()));
    }
    for (double y : responses) {
        if (!std::isfinite(y)) {
            throw AnalysisError(AnalysisErrc::IncompleteDesign, "non-finite response");
        }
    }

    RegressionModel model;
    model.k = k;
    const double n = static_cast<double>(cells);
    auto contrast = [&](auto sign) {
        double sum = 0.0;
        for (std::size_t m = 0; m < cells; ++m) sum += responses[m] * sign(m);
        return sum / n;
    };

    model.intercept = contrast([](std::size_t) { return 1; });
    for (std::size_t i = 0; i < k; ++i) {
        model.terms.push_back({{i}, contrast([i](std::size_t m) { return level(m, i); }), 0.0});
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            model.terms.push_back(
                {{i, j}, contrast([i, j](std::size_t m) { return level(m, i) * level(m, j); }), 0.0});
        }
    }

    model.min_response = *std::min_element(responses.begin(), responses.end());
    model.max_response = *std::max_element(responses.begin(), responses.end());
    std::vector<int> x(k);
    for (std::size_t m = 0; m < cells; ++m) {
        const double dev = responses[m] - model.intercept;
        model.sst += dev * dev;
        for (std::size_t i = 0; i < k; ++i) x[i] = level(m, i);
        const double err = responses[m] - model.predict(x);
        model.sse += err * err;
    }

    if (model.sst > 0.0) {
        for (auto& t : model.terms) t.contribution_pct = 100.0 * n * t.coefficient * t.coefficient / model.sst;
        model.r2_pct = 100.0 * (model.sst - model.sse) / model.sst;
    } else {
        model.sse = 0.0;
        model.r2_pct = 100.0;
    }
    return model;
}

RegressionModel rsm_fit(std::size_t k, const std::map<std::vector<int>, double>& responses) {
    if (k == 0 || k > max_factors) {
        throw AnalysisError(AnalysisErrc::IncompleteDesign, "factor count must be 1..20");
    }
    const std::size_t cells = std::size_t{1} << k;
    std::vector<double> table(cells, 0.0);
    std::vector<bool> seen(cells, false);
    for (const auto& [point, y] : responses) {
        if (point.size() != k) {
            throw AnalysisError(AnalysisErrc::IncompleteDesign, "design point with wrong arity");
        }
        std::size_t m = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (point[i] == 1) {
                m |= std::size_t{1} << i;
            } else if (point[i] != -1) {
                throw AnalysisError(AnalysisErrc::IncompleteDesign, "factor levels must be -1 or 1");
            }
        }
        table[m] = y;
        seen[m] = true;
    }
    if (std::count(seen.begin(), seen.end(), true) != static_cast<std::ptrdiff_t>(cells)) {
        throw AnalysisError(AnalysisErrc::IncompleteDesign, "missing design points");
    }
    return rsm_fit(k, std::span<const double>(table));
}

}  // namespace vardislab::analysis

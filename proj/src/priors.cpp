#include "priors.hpp"

#include <cmath>
#include <limits>

namespace bpop {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
}

void validate(const Hyperparams& h) {
    if (!(h.alpha_rho > 0.0)) fail(Errc::invalid_argument, "alpha_rho must be positive");
    if (!(h.gamma_a > 0.0) || !(h.gamma_b > 0.0))
        fail(Errc::invalid_argument, "gamma shape and rate must be positive");
    if (!(h.lambda > 0.0)) fail(Errc::invalid_argument, "lambda must be positive");
    if (!(h.rho_step > 0.0 && h.rho_step < 1.0))
        fail(Errc::invalid_argument, "rho_step must lie in (0,1)");
    if (!(h.beta_step > 0.0)) fail(Errc::invalid_argument, "beta_step must be positive");
}

std::vector<std::vector<double>> sigma_rho(double rho, int K) {
    if (!(rho >= 0.0 && rho < 1.0)) fail(Errc::invalid_argument, "rho must lie in [0,1)");
    std::vector<std::vector<double>> s(K, std::vector<double>(K, rho));
    for (int i = 0; i < K; ++i) s[i][i] = 1.0;
    return s;
}

double row_log_prior(const std::vector<double>& row, double rho) {
    int K = int(row.size());
    if (K == 0) fail(Errc::invalid_argument, "empty embedding row");
    if (!(rho >= 0.0 && rho < 1.0)) return kNegInf;
    // eigenvalues: 1+(K-1)rho once, 1-rho with multiplicity K-1
    double a = 1.0 + (K - 1) * rho;
    double b = 1.0 - rho;
    double sum = 0.0, sumsq = 0.0;
    for (double x : row) {
        sum += x;
        sumsq += x * x;
    }
    double logdet = (K - 1) * std::log(b) + std::log(a);
    double quad = (sumsq - rho * sum * sum / a) / b;
    return -0.5 * (K * kLog2Pi + logdet + quad);
}

double log_prior_U(const std::vector<std::vector<double>>& U, double rho) {
    double total = 0.0;
    for (const auto& row : U) total += row_log_prior(row, rho);
    return total;
}

CondColumn conditional_column_params(const std::vector<double>& row, double rho) {
    int K = int(row.size());
    if (K == 0) fail(Errc::invalid_argument, "empty embedding row");
    double sum = 0.0;
    for (double x : row) sum += x;
    double a = 1.0 + (K - 1) * rho;
    CondColumn c;
    c.mu = rho * sum / a;
    c.var = (1.0 + (K - 1) * rho - K * rho * rho) / a;
    return c;
}

double log_prior_rho(double rho, const Hyperparams& h) {
    if (!(rho >= 0.0 && rho < 1.0)) return kNegInf;
    // Beta(1, alpha_rho): alpha_rho (1-rho)^(alpha_rho - 1)
    return std::log(h.alpha_rho) + (h.alpha_rho - 1.0) * std::log1p(-rho);
}

double log_prior_beta(double beta, const Hyperparams& h) {
    if (!(beta > 0.0)) return kNegInf;
    return h.gamma_a * std::log(h.gamma_b) - std::lgamma(h.gamma_a) +
           (h.gamma_a - 1.0) * std::log(beta) - h.gamma_b * beta;
}

double log_prior_K(int K, const Hyperparams& h) {
    if (K < 1) return kNegInf;
    return K * std::log(h.lambda) - h.lambda - std::lgamma(double(K) + 1.0) -
           std::log1p(-std::exp(-h.lambda));
}

std::vector<double> sample_prior_row(int K, double rho, Rng& rng) {
    double w = std::sqrt(rho) * rng.normal();
    double sb = std::sqrt(1.0 - rho);
    std::vector<double> row(K);
    for (int k = 0; k < K; ++k) row[k] = sb * rng.normal() + w;
    return row;
}

} // namespace bpop

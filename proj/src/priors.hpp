#pragma once

#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace bpop {

struct Hyperparams {
    double alpha_rho = 1.0; // rho ~ Beta(1, alpha_rho)
    double gamma_a = 2.0;   // beta ~ Gamma(a, b), shape/rate
    double gamma_b = 1.0;
    double lambda = 3.0;    // K ~ Poisson(lambda) truncated to K >= 1
    double rho_step = 0.8;  // d_r, multiplicative rho walk factor range
    double beta_step = 0.3; // sigma of the log-beta random walk
};

void validate(const Hyperparams& h);

// Sigma_rho = (1-rho)I + rho 11^T, the exchangeable row covariance.
std::vector<std::vector<double>> sigma_rho(double rho, int K);

// log N(row; 0, Sigma_rho) via the closed-form inverse/determinant.
double row_log_prior(const std::vector<double>& row, double rho);
double log_prior_U(const std::vector<std::vector<double>>& U, double rho);

// Conditional law of one additional exchangeable coordinate given an
// existing width-K row.
struct CondColumn {
    double mu;
    double var;
};
CondColumn conditional_column_params(const std::vector<double>& row, double rho);

double log_prior_rho(double rho, const Hyperparams& h);
double log_prior_beta(double beta, const Hyperparams& h);
double log_prior_K(int K, const Hyperparams& h);

// Draw from N(0, Sigma_rho): sqrt(1-rho) z + sqrt(rho) w 1.
std::vector<double> sample_prior_row(int K, double rho, Rng& rng);

} // namespace bpop

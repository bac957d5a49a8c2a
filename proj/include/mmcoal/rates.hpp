#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mmcoal {

struct PointAtom {
    double location;  // psi in (0, 1]
    double mass;
};

struct BetaComponent {
    double alpha;  // Beta(2 - alpha, alpha), alpha in (1, 2)
    double mass;
};

/// Probability measure driving a Lambda-coalescent: a Kingman atom at 0, point atoms on (0, 1]
/// and an optional Beta(2 - alpha, alpha) component.
class LambdaMeasure {
public:
    LambdaMeasure(double kingman_mass, std::vector<PointAtom> atoms,
                  std::optional<BetaComponent> beta = std::nullopt);

    static LambdaMeasure kingman();
    static LambdaMeasure star();
    /// 2/(2+psi^2) delta_0 + psi^2/(2+psi^2) delta_psi
    static LambdaMeasure eldon_wakeley(double psi);
    static LambdaMeasure beta(double alpha);

    double kingman_mass() const { return kingman_mass_; }
    const std::vector<PointAtom>& atoms() const { return atoms_; }
    const std::optional<BetaComponent>& beta_component() const { return beta_; }

    bool is_pure_kingman() const { return kingman_mass_ == 1.0; }
    std::string describe() const;

private:
    double kingman_mass_;
    std::vector<PointAtom> atoms_;
    std::optional<BetaComponent> beta_;
};

/// lambda_{n,k} = int r^{k-2} (1-r)^{n-k} Lambda(dr). The Kingman atom contributes only to k = 2
/// and only when include_kingman_atom is set. Beta part via log-gamma.
double lambda_rate(const LambdaMeasure& measure, int n, int k, bool include_kingman_atom = true);

/// -q_nn = sum_{k=2}^n C(n,k) lambda_{n,k}
double total_coal_rate(const LambdaMeasure& measure, int n);

/// Precomputed merger rates for 2 <= k <= n <= n_max. Immutable after construction.
///
/// The jump part (integral over (0,1]) and the Kingman atom are kept apart: the CSD
/// absorption formulas use the jump part with a separate Lambda({0}) term, while the
/// forward kernel uses the combined rate.
class RateTable {
public:
    RateTable(const LambdaMeasure& measure, int n_max);

    int n_max() const { return n_max_; }
    double kingman_mass() const { return kingman_mass_; }

    double jump(int n, int k) const;
    double lambda(int n, int k) const;  // jump + kingman_mass * [k == 2]
    double log_lambda(int n, int k) const;
    double log_jump(int n, int k) const;
    /// log(C(n,k) lambda_{n,k}), combined rate.
    double log_coal_weight(int n, int k) const;
    /// -q_nn; zero for n < 2.
    double total(int n) const;
    /// sum_{k=2}^{n} C(n,k) jump(n,k), jump part only.
    double jump_total(int n) const;

    const LambdaMeasure& measure() const { return measure_; }

private:
    std::size_t idx(int n, int k) const;
    void check(int n, int k) const;

    LambdaMeasure measure_;
    int n_max_;
    double kingman_mass_;
    std::vector<double> jump_;
    std::vector<double> log_jump_;
    std::vector<double> totals_;
    std::vector<double> jump_totals_;
};

RateTable build_rate_table(const LambdaMeasure& measure, int n_max);

}  // namespace mmcoal

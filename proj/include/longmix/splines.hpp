#pragma once

// Spline bases on the retrospective time axis: natural cubic splines with
// linear tails, cubic B-splines (Cox-de Boor), the curvature penalty
// W = integral of B''(t) B''(t)^T over the domain, and the eigendecomposition
// transform that splits a B-spline basis into (1, t) plus curvature-
// orthonormal nonlinear columns.
//
// All operations are pure and the returned objects immutable.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace longmix {

enum class KnotPlacement { Quantile, EquallySpaced };

struct KnotSequence {
    std::vector<double> interior;      // sorted, strictly inside the boundary
    std::pair<double, double> boundary;
    KnotPlacement placement = KnotPlacement::Quantile;

    int n_interior() const { return static_cast<int>(interior.size()); }
    void validate() const;
};

/// Interior knots at equally spaced quantiles of the observed times
/// (K = 3 gives the 25/50/75th percentiles); boundary at min/max.
KnotSequence quantile_knots(const std::vector<double>& times, int k);

/// K equally spaced interior knots strictly inside [lo, hi].
KnotSequence equally_spaced_knots(double lo, double hi, int k);

/// Evaluates the K+1 natural cubic spline time functions: the identity t
/// followed by K curvature-carrying columns built from truncated powers,
/// each scaled by the squared boundary span. Second derivatives vanish at
/// and beyond both boundary knots, so extrapolation is linear.
class NaturalCubicBasis {
public:
    explicit NaturalCubicBasis(KnotSequence knots);

    int size() const { return knots_.n_interior() + 1; }
    const KnotSequence& knots() const { return knots_; }

    /// Row of basis values (or of the order-th derivative) at time t.
    Eigen::RowVectorXd row(double t, int deriv_order = 0) const;

private:
    KnotSequence knots_;
    std::vector<double> all_knots_;  // boundary.min, interior..., boundary.max
    double inv_span_sq_;
};

/// Cox-de Boor B-spline basis of the given degree on a clamped knot vector.
/// Evaluation outside the boundary interval is an error.
class BSplineBasis {
public:
    BSplineBasis(KnotSequence knots, int degree = 3);

    int size() const { return knots_.n_interior() + degree_ + 1; }
    int degree() const { return degree_; }
    const KnotSequence& knots() const { return knots_; }
    std::pair<double, double> domain() const { return knots_.boundary; }

    Eigen::RowVectorXd row(double t, int deriv_order = 0) const;

private:
    KnotSequence knots_;
    int degree_;
    std::vector<double> padded_;  // clamped knot vector

    int find_span(double t) const;
};

enum class BasisKind { NaturalCubic, BSpline };

struct BasisMatrix {
    Eigen::MatrixXd values;  // one row per evaluation time
    BasisKind kind;
    int degree;              // 3 for natural cubic
    KnotSequence knots;
    std::vector<double> times;

    int n_functions() const { return static_cast<int>(values.cols()); }
};

BasisMatrix natural_cubic_basis(const std::vector<double>& times,
                                const KnotSequence& knots);
BasisMatrix bspline_basis(const std::vector<double>& times,
                          const KnotSequence& knots, int degree = 3);

/// Curvature penalty W(i, j) = integral of B_i''(t) B_j''(t) dt over the
/// boundary interval, evaluated exactly by Gauss-Legendre quadrature on
/// each inter-knot interval. Symmetric PSD with rank Z - 2.
Eigen::MatrixXd penalty_matrix(const KnotSequence& knots, int degree = 3);

/// B-spline basis reorganized as (1, t, B2~(t)) where B2~ = B^T V2 D^{-1/2}
/// collects the curvature-carrying directions of W = [V1 V2] diag(0, D)
/// [V1 V2]^T. The columns of B2~ have identity curvature cross-products.
class TransformedBasis {
public:
    TransformedBasis(BSplineBasis basis, Eigen::MatrixXd penalty);

    int raw_dim() const { return basis_.size(); }        // Z
    int nonlinear_dim() const { return raw_dim() - 2; }  // Z - 2
    const Eigen::MatrixXd& penalty() const { return penalty_; }
    const Eigen::MatrixXd& eigen_linear() const { return v1_; }
    const Eigen::MatrixXd& eigen_nonlinear() const { return v2_; }
    const Eigen::VectorXd& eigenvalues() const { return delta_; }
    const BSplineBasis& raw_basis() const { return basis_; }
    std::pair<double, double> domain() const { return basis_.domain(); }

    /// (1, t, B2~(t)): a row of length Z.
    Eigen::RowVectorXd row(double t) const;
    /// Just the Z-2 nonlinear values at t.
    Eigen::RowVectorXd nonlinear_row(double t) const;

    /// Full design over a grid, columns (1, t, B2~).
    Eigen::MatrixXd design(const std::vector<double>& times) const;

private:
    BSplineBasis basis_;
    Eigen::MatrixXd penalty_;
    Eigen::MatrixXd v1_;       // Z x 2, null space of W (spans 1 and t)
    Eigen::MatrixXd v2_;       // Z x (Z-2)
    Eigen::VectorXd delta_;    // positive eigenvalues, ascending
    Eigen::MatrixXd scaled_;   // V2 * D^{-1/2}
};

/// Convenience builder: equally spaced or quantile B-spline basis plus its
/// penalty and transform in one call.
TransformedBasis make_transformed_basis(const KnotSequence& knots,
                                        int degree = 3);

/// CSV export of a basis evaluated on its times grid (for plotting).
std::string basis_to_csv(const BasisMatrix& basis);

}  // namespace longmix

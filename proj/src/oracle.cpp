#include "memlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "memlab/distributions.hpp"

namespace memlab::oracle {

namespace {

struct LabeledColumn {
    double sigma;
    std::vector<double> u;
    std::vector<double> v;
};

linalg::SvdFactors assemble(std::vector<LabeledColumn> cols, int m, int n) {
    std::stable_sort(cols.begin(), cols.end(),
                     [](const LabeledColumn& a, const LabeledColumn& b) {
                         return a.sigma > b.sigma;
                     });
    linalg::SvdFactors f;
    f.rank_tolerance = 0.0; // full factors, structural zeros included
    const int r = static_cast<int>(cols.size());
    f.u = Matrix(m, r);
    f.v = Matrix(n, r);
    f.s.resize(r);
    for (int k = 0; k < r; ++k) {
        f.s[k] = cols[k].sigma;
        for (int i = 0; i < m; ++i) f.u(i, k) = cols[k].u[i];
        for (int i = 0; i < n; ++i) f.v(i, k) = cols[k].v[i];
    }
    return f;
}

// X expressed in the embedding basis: W = E~ X E^T.
Matrix conjugate(const Matrix& x, const embeddings::EmbeddingPair& emb) {
    return matmul(emb.e_til, matmul(x, transpose(emb.e)));
}

double block_coeff(int i, int l, double head, double tail) {
    return i < l ? head : tail;
}

} // namespace

double TwoClassParams::lambda() const {
    const double b = beta();
    return std::sqrt(alpha * alpha * std::pow(1.0 - b, 3) +
                     (1.0 - alpha) * (1.0 - alpha) * std::pow(b, 3));
}

void TwoClassParams::validate() const {
    if (k < 2 || l < 1 || l >= k) throw std::invalid_argument("TwoClassParams: need 1 <= l < k");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("TwoClassParams: alpha must be in (0, 1)");
    }
}

Matrix gradient_at_zero(const TwoClassParams& params, const embeddings::EmbeddingPair& emb) {
    params.validate();
    if (emb.k() != params.k) throw std::invalid_argument("gradient_at_zero: K mismatch");
    const int k = params.k;
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    Matrix x(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double xj = block_coeff(j, params.l, g1, g2);
            x(i, j) = (i == j ? xj : 0.0) - xj / k;
        }
    }
    return -1.0 * conjugate(x, emb);
}

double gd_eta(const TwoClassParams& params, double eps) {
    params.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("gd_eta: eps must be in (0, 1)");
    const double gmax = std::max(params.gamma1(), params.gamma2());
    return std::log((1.0 / eps - 1.0) * (params.k - 1)) / gmax;
}

double gd_min_prob(const TwoClassParams& params, double eps) {
    params.validate();
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("gd_min_prob: eps must be in (0, 1)");
    }
    const double r = distributions::imbalance_ratio(params.alpha, params.beta());
    const double denom = eps + std::pow(1.0 - eps, r) * std::pow(eps, 1.0 - r) *
                                   std::pow(static_cast<double>(params.k - 1), r - 1.0);
    return 1.0 - eps / denom;
}

Matrix muon_update_closed_form(const TwoClassParams& params,
                               const embeddings::EmbeddingPair& emb) {
    params.validate();
    if (emb.k() != params.k) throw std::invalid_argument("muon_update_closed_form: K mismatch");
    const int k = params.k;
    const int l = params.l;
    const double b = params.beta();
    const double lam = params.lambda();
    const double c11 = ((1.0 - b) * (1.0 - b) * params.alpha / lam - 1.0) / b;
    const double c22 = (b * b * (1.0 - params.alpha) / lam - 1.0) / (1.0 - b);
    const double c12 = -b * (1.0 - params.alpha) / lam;
    const double c21 = -params.alpha * (1.0 - b) / lam;
    Matrix x(k, k);
    for (int i = 0; i < k; ++i) {
        const bool ih = i < l;
        for (int j = 0; j < k; ++j) {
            const bool jh = j < l;
            const double c = ih ? (jh ? c11 : c12) : (jh ? c21 : c22);
            x(i, j) = (i == j ? 1.0 : 0.0) + c / k;
        }
    }
    return -1.0 * conjugate(x, emb);
}

Matrix ones_complement_basis(int n) {
    if (n < 1) throw std::invalid_argument("ones_complement_basis: n must be >= 1");
    Matrix r(n, n - 1);
    for (int j = 1; j < n; ++j) {
        const double norm = std::sqrt(static_cast<double>(j) * (j + 1));
        for (int i = 0; i < j; ++i) r(i, j - 1) = 1.0 / norm;
        r(j, j - 1) = -static_cast<double>(j) / norm;
    }
    return r;
}

namespace {

void append_subspace_columns(std::vector<LabeledColumn>& cols, double sigma, int offset, int n,
                             int k) {
    const Matrix basis = ones_complement_basis(n);
    for (int j = 0; j < n - 1; ++j) {
        LabeledColumn c;
        c.sigma = sigma;
        c.u.assign(k, 0.0);
        c.v.assign(k, 0.0);
        for (int i = 0; i < n; ++i) {
            c.u[offset + i] = basis(i, j);
            c.v[offset + i] = basis(i, j);
        }
        cols.push_back(std::move(c));
    }
}

std::vector<double> embed_pair(double p1, double p2, int l, int k) {
    std::vector<double> v(k, 0.0);
    const double s1 = p1 / std::sqrt(static_cast<double>(l));
    const double s2 = p2 / std::sqrt(static_cast<double>(k - l));
    for (int i = 0; i < l; ++i) v[i] = s1;
    for (int i = l; i < k; ++i) v[i] = s2;
    return v;
}

} // namespace

linalg::SvdFactors svd_block_constant(double a, double b, double c11, double c12, double c21,
                                      double c22, int l, int k) {
    if (l < 1 || l >= k) throw std::invalid_argument("svd_block_constant: need 1 <= l < k");
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("svd_block_constant: a, b > 0");

    std::vector<LabeledColumn> cols;
    append_subspace_columns(cols, a, 0, l, k);
    append_subspace_columns(cols, b, l, k - l, k);

    const double cross = std::sqrt(static_cast<double>(l) * (k - l));
    const double ma = a + l * c11;
    const double mb = cross * c12;
    const double mg = cross * c21;
    const double md = b + (k - l) * c22;

    // Right singular vectors of the reduced 2x2 from the eigen-rotation of
    // M^T M; left vectors recovered as M v / sigma.
    const double g00 = ma * ma + mg * mg;
    const double g11 = mb * mb + md * md;
    const double g01 = ma * mb + mg * md;
    const double theta = 0.5 * std::atan2(2.0 * g01, g00 - g11);
    const double vt[2][2] = {{std::cos(theta), std::sin(theta)},
                             {-std::sin(theta), std::cos(theta)}};
    double sv[2];
    double uv[2][2];
    for (int i = 0; i < 2; ++i) {
        const double mv0 = ma * vt[i][0] + mb * vt[i][1];
        const double mv1 = mg * vt[i][0] + md * vt[i][1];
        sv[i] = std::hypot(mv0, mv1);
        if (sv[i] > 1e-300) {
            uv[i][0] = mv0 / sv[i];
            uv[i][1] = mv1 / sv[i];
        } else {
            uv[i][0] = 0.0; // filled from the complement of the other u below
            uv[i][1] = 0.0;
        }
    }
    for (int i = 0; i < 2; ++i) {
        if (sv[i] <= 1e-300) {
            uv[i][0] = -uv[1 - i][1];
            uv[i][1] = uv[1 - i][0];
        }
    }
    for (int i = 0; i < 2; ++i) {
        LabeledColumn c;
        c.sigma = sv[i];
        c.v = embed_pair(vt[i][0], vt[i][1], l, k);
        c.u = embed_pair(uv[i][0], uv[i][1], l, k);
        cols.push_back(std::move(c));
    }
    return assemble(std::move(cols), k, k);
}

linalg::SvdFactors svd_simp(double a, double b, int l, int k) {
    if (l < 1 || l >= k) throw std::invalid_argument("svd_simp: need 1 <= l < k");
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("svd_simp: a, b > 0");

    std::vector<LabeledColumn> cols;
    append_subspace_columns(cols, a, 0, l, k);
    append_subspace_columns(cols, b, l, k - l, k);

    const double dl = static_cast<double>(l);
    const double dkl = static_cast<double>(k - l);
    const double mass = a * a * dkl + b * b * dl;

    LabeledColumn top;
    top.sigma = std::sqrt(mass / k);
    top.v = embed_pair(a * std::sqrt(dkl / mass), -b * std::sqrt(dl / mass), l, k);
    top.u = embed_pair(dkl * std::sqrt(dl / (k * dl * dkl)),
                       -dl * std::sqrt(dkl / (k * dl * dkl)), l, k);
    cols.push_back(std::move(top));

    LabeledColumn null_dir;
    null_dir.sigma = 0.0;
    null_dir.v = embed_pair(b * std::sqrt(dl / mass), a * std::sqrt(dkl / mass), l, k);
    null_dir.u = embed_pair(std::sqrt(dl / k), std::sqrt(dkl / k), l, k);
    cols.push_back(std::move(null_dir));

    return assemble(std::move(cols), k, k);
}

AdamAdversarial adam_adversarial() {
    AdamAdversarial r;
    r.a_mat = Matrix(3, 3);
    const double a_vals[9] = {2, 0, 0, 2, 0, 2, -2, -2, -2};
    const double b_vals[9] = {-1, -1, -1, -1, -1, -1, 1, 1, 1};
    r.b_mat = Matrix(3, 3);
    for (int i = 0; i < 9; ++i) {
        r.a_mat.values[i] = a_vals[i];
        r.b_mat.values[i] = b_vals[i];
    }
    r.sum_mat = r.a_mat + r.b_mat;
    const Matrix r1 = embeddings::rotation_block(3.638, 2.949, 5.218);
    const Matrix r2 = embeddings::rotation_block(1.715, 0.876, 3.098);
    r.rotated_sum = matmul(transpose(r1), matmul(r.sum_mat, r2));
    r.rotated_b = matmul(transpose(r1), matmul(r.b_mat, r2));
    r.r_exponent = 1.668 / 2.471;
    r.eta_bound_rate = 2.471;
    return r;
}

std::vector<double> singular_values_3x3(const Matrix& m) {
    if (m.rows != 3 || m.cols != 3) throw std::invalid_argument("singular_values_3x3: need 3x3");
    // eigenvalues of the symmetric Gram matrix via the trigonometric
    // solution of the characteristic cubic
    double s[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int r = 0; r < 3; ++r) s[i][j] += m(r, i) * m(r, j);

    const double q = (s[0][0] + s[1][1] + s[2][2]) / 3.0;
    const double p1 = s[0][1] * s[0][1] + s[0][2] * s[0][2] + s[1][2] * s[1][2];
    double eig[3];
    if (p1 == 0.0) {
        eig[0] = s[0][0];
        eig[1] = s[1][1];
        eig[2] = s[2][2];
    } else {
        const double p2 = (s[0][0] - q) * (s[0][0] - q) + (s[1][1] - q) * (s[1][1] - q) +
                          (s[2][2] - q) * (s[2][2] - q) + 2.0 * p1;
        const double p = std::sqrt(p2 / 6.0);
        double bmat[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) bmat[i][j] = (s[i][j] - (i == j ? q : 0.0)) / p;
        const double detb =
            bmat[0][0] * (bmat[1][1] * bmat[2][2] - bmat[1][2] * bmat[2][1]) -
            bmat[0][1] * (bmat[1][0] * bmat[2][2] - bmat[1][2] * bmat[2][0]) +
            bmat[0][2] * (bmat[1][0] * bmat[2][1] - bmat[1][1] * bmat[2][0]);
        const double rr = std::clamp(detb / 2.0, -1.0, 1.0);
        const double phi = std::acos(rr) / 3.0;
        eig[0] = q + 2.0 * p * std::cos(phi);
        eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
        eig[1] = 3.0 * q - eig[0] - eig[2];
    }
    std::vector<double> sv = {std::sqrt(std::max(eig[0], 0.0)), std::sqrt(std::max(eig[1], 0.0)),
                              std::sqrt(std::max(eig[2], 0.0))};
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

double adam_singular_ratio() {
    const std::vector<double> sv = singular_values_3x3(adam_adversarial().a_mat);
    return sv[2] / sv[0];
}

StructureReport multi_step_structure_check(const std::vector<Matrix>& states,
                                           const embeddings::EmbeddingPair& emb,
                                           const TwoClassParams& params) {
    params.validate();
    StructureReport report;
    const int k = params.k;
    const int l = params.l;
    int step = 0;
    for (const Matrix& w : states) {
        ++step;
        const Matrix x = matmul(transpose(emb.e_til), matmul(w, emb.e));
        StructureStep st;
        st.step = step;

        double diag_head = 0.0, diag_tail = 0.0;
        double off11 = 0.0, off22 = 0.0, sum12 = 0.0, sum21 = 0.0;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                const double v = x(i, j);
                if (i < l && j < l) {
                    if (i == j) diag_head += v;
                    else off11 += v;
                } else if (i >= l && j >= l) {
                    if (i == j) diag_tail += v;
                    else off22 += v;
                } else if (i < l) {
                    sum12 += v;
                } else {
                    sum21 += v;
                }
            }
        }
        const double dl = static_cast<double>(l);
        const double dkl = static_cast<double>(k - l);
        st.c11 = dl > 1 ? off11 / (dl * (dl - 1.0)) : 0.0;
        st.c22 = dkl > 1 ? off22 / (dkl * (dkl - 1.0)) : 0.0;
        st.c12 = sum12 / (dl * dkl);
        st.c21 = sum21 / (dl * dkl);
        st.a = diag_head / dl - st.c11;
        st.b = diag_tail / dkl - st.c22;

        double res2 = 0.0;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                double fit;
                if (i < l && j < l) fit = st.c11 + (i == j ? st.a : 0.0);
                else if (i >= l && j >= l) fit = st.c22 + (i == j ? st.b : 0.0);
                else if (i < l) fit = st.c12;
                else fit = st.c21;
                const double d = x(i, j) - fit;
                res2 += d * d;
            }
        }
        st.residual = std::sqrt(res2);

        report.max_residual = std::max(report.max_residual, st.residual);
        report.max_ab_gap = std::max(report.max_ab_gap, std::fabs(st.a - st.b));
        const double cmax = std::max({std::fabs(st.c11), std::fabs(st.c12), std::fabs(st.c21),
                                      std::fabs(st.c22)});
        if (st.a > 0.0) report.max_c_ratio = std::max(report.max_c_ratio, cmax * k / st.a);
        report.steps.push_back(st);
    }
    report.structure_ok = report.max_residual <= 1e-6;
    return report;
}

} // namespace memlab::oracle

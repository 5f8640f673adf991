#include "slse/model.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "slse/error.hpp"

namespace slse {

namespace {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (auto& v : m.data) v = rng.normal();
    return m;
}

Vector generate_noise(std::size_t n, double sigma2, std::uint64_t seed) {
    Vector zeta(n, 0.0);
    if (sigma2 > 0.0) {
        Rng rng(Rng::derive(seed, "noise"));
        const double sigma = std::sqrt(sigma2);
        for (auto& v : zeta) v = sigma * rng.normal();
    }
    return zeta;
}

}  // namespace

LinearModel gen_model(std::size_t n, std::size_t d, double kappa, double sigma2,
                      std::uint64_t seed) {
    if (d < 1 || n < d)
        throw config_error("gen_model: need n >= d >= 1 (overdetermined systems only), got n=" +
                           std::to_string(n) + " d=" + std::to_string(d));
    if (kappa < 1.0) throw config_error("gen_model: kappa must be >= 1");
    if (sigma2 < 0.0) throw config_error("gen_model: sigma2 must be >= 0");

    LinearModel model;
    model.n = n;
    model.d = d;
    model.kappa = kappa;
    model.sigma2 = sigma2;
    model.seed = seed;

    Rng rng_u(Rng::derive(seed, "haar-left"));
    Rng rng_v(Rng::derive(seed, "haar-right"));
    Rng rng_b(Rng::derive(seed, "beta"));

    // Haar factors: QR of Gaussian matrices with the R diagonal sign fixed.
    Matrix u = qr_thin(gaussian_matrix(n, d, rng_u)).q;
    Matrix v = qr_thin(gaussian_matrix(d, d, rng_v)).q;

    // Singular values log-spaced on [1, kappa].
    Vector s(d, 1.0);
    if (d > 1 && kappa > 1.0) {
        const double step = std::log(kappa) / static_cast<double>(d - 1);
        for (std::size_t j = 0; j < d; ++j) s[j] = std::exp(step * static_cast<double>(j));
        s[d - 1] = kappa;
    }

    // X = (U diag(s)) V'.
    for (std::size_t j = 0; j < d; ++j) {
        double* cj = u.col(j);
        for (std::size_t i = 0; i < n; ++i) cj[i] *= s[j];
    }
    model.x = matmul(u, transpose(v));

    model.beta_true.resize(d);
    for (auto& b : model.beta_true) b = rng_b.normal();

    Vector zeta = generate_noise(n, sigma2, seed);
    model.y = matvec(model.x, model.beta_true);
    for (std::size_t i = 0; i < n; ++i) model.y[i] += zeta[i];

    if (!all_finite(model.x.data) || !all_finite(model.y))
        throw numeric_error("gen_model: nonfinite output");
    return model;
}

void redraw_noise(LinearModel& model, std::uint64_t noise_seed) {
    model.seed = noise_seed;
    Vector zeta = generate_noise(model.n, model.sigma2, noise_seed);
    model.y = matvec(model.x, model.beta_true);
    for (std::size_t i = 0; i < model.n; ++i) model.y[i] += zeta[i];
}

Vector ols_solve(const LinearModel& model) {
    const Matrix r = qr_r_only(model.x);
    Vector xty = matvec_t(model.x, model.y);
    Vector beta = tri_solve_pair(r, xty);
    // One corrected semi-normal-equations pass keeps the normal-equations
    // residual at roundoff even for ill-conditioned X.
    Vector res = matvec(model.x, beta);
    for (std::size_t i = 0; i < model.n; ++i) res[i] = model.y[i] - res[i];
    Vector corr = tri_solve_pair(r, matvec_t(model.x, res));
    for (std::size_t j = 0; j < model.d; ++j) beta[j] += corr[j];
    return beta;
}

double pred_error(const LinearModel& model, const Vector& b) {
    if (b.size() != model.d) throw dim_error("pred_error: coefficient length does not match d");
    Vector diff(model.d);
    for (std::size_t j = 0; j < model.d; ++j) diff[j] = b[j] - model.beta_true[j];
    Vector xd = matvec(model.x, diff);
    return dot(xd, xd);
}

namespace {

constexpr std::uint64_t kModelMagic = 0x314c444d45534c53ULL;  // "SLSEMDL1"
constexpr std::uint64_t kModelVersion = 1;

void put_u64(std::FILE* f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    if (std::fwrite(b, 1, 8, f) != 8) throw io_error("model_save: short write");
}

void put_f64(std::FILE* f, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(f, bits);
}

std::uint64_t get_u64(std::FILE* f, const std::string& path) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, f) != 8) throw io_error("model_load: short read from " + path);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::FILE* f, const std::string& path) {
    std::uint64_t bits = get_u64(f, path);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

}  // namespace

void model_save(const LinearModel& model, const std::string& path) {
    const std::string tmp = path + ".tmp";
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw io_error("model_save: cannot open " + tmp);
    put_u64(f.get(), kModelMagic);
    put_u64(f.get(), kModelVersion);
    put_u64(f.get(), model.n);
    put_u64(f.get(), model.d);
    put_f64(f.get(), model.sigma2);
    put_f64(f.get(), model.kappa);
    put_u64(f.get(), model.seed);
    for (double v : model.x.data) put_f64(f.get(), v);
    for (double v : model.beta_true) put_f64(f.get(), v);
    for (double v : model.y) put_f64(f.get(), v);
    f.reset();
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw io_error("model_save: cannot rename " + tmp + " to " + path);
}

LinearModel model_load(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
    if (!f) throw io_error("model_load: cannot open " + path);
    if (get_u64(f.get(), path) != kModelMagic) throw io_error("model_load: bad magic in " + path);
    if (get_u64(f.get(), path) != kModelVersion)
        throw io_error("model_load: unsupported version in " + path);
    LinearModel model;
    model.n = get_u64(f.get(), path);
    model.d = get_u64(f.get(), path);
    model.sigma2 = get_f64(f.get(), path);
    model.kappa = get_f64(f.get(), path);
    model.seed = get_u64(f.get(), path);
    if (model.d == 0 || model.n < model.d) throw io_error("model_load: corrupt header in " + path);
    model.x = Matrix(model.n, model.d);
    for (auto& v : model.x.data) v = get_f64(f.get(), path);
    model.beta_true.resize(model.d);
    for (auto& v : model.beta_true) v = get_f64(f.get(), path);
    model.y.resize(model.n);
    for (auto& v : model.y) v = get_f64(f.get(), path);
    return model;
}

}  // namespace slse

#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace efresnel {

using cd = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Errors

struct InvalidMatrix : std::runtime_error {
    explicit InvalidMatrix(const std::string& m) : std::runtime_error(m) {}
};
struct InvalidParams : std::runtime_error {
    explicit InvalidParams(const std::string& m) : std::runtime_error(m) {}
};
struct InvalidGrid : std::runtime_error {
    explicit InvalidGrid(const std::string& m) : std::runtime_error(m) {}
};
struct SingularB : std::runtime_error {
    explicit SingularB(const std::string& m) : std::runtime_error(m) {}
};
struct SingularC : std::runtime_error {
    explicit SingularC(const std::string& m) : std::runtime_error(m) {}
};
struct ImaginaryResidue : std::runtime_error {
    explicit ImaginaryResidue(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateStrip : std::runtime_error {
    explicit DegenerateStrip(const std::string& m) : std::runtime_error(m) {}
};
struct ExcessiveExtrapolation : std::runtime_error {
    explicit ExcessiveExtrapolation(const std::string& m) : std::runtime_error(m) {}
};
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};
struct SizeCapExceeded : std::runtime_error {
    explicit SizeCapExceeded(const std::string& m) : std::runtime_error(m) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

// ---------------------------------------------------------------------------
// Ray-transfer matrices and squeeze parameters

inline constexpr double unimodularity_tol = 1e-12;

struct ABCDMatrix {
    double a, b, c, d;

    double det() const { return a * d - b * c; }

    void validate() const {
        if (std::abs(det() - 1.0) > unimodularity_tol)
            throw InvalidMatrix("matrix is not unimodular: |AD-BC-1| = " +
                                std::to_string(std::abs(det() - 1.0)));
    }

    static ABCDMatrix identity() { return {1, 0, 0, 1}; }
    static ABCDMatrix free_space(double b) { return {1, b, 0, 1}; }
    static ABCDMatrix thin_lens(double c) { return {1, 0, c, 1}; }
};

struct SqueezeParams {
    cd k, t;

    void validate() const {
        double r = std::norm(k) - std::norm(t);
        if (std::abs(r - 1.0) > unimodularity_tol)
            throw InvalidParams("params violate |k|^2-|t|^2=1: residual = " +
                                std::to_string(std::abs(r - 1.0)));
    }
};

inline SqueezeParams params_from_abcd(const ABCDMatrix& m) {
    m.validate();
    SqueezeParams p;
    p.k = 0.5 * cd(m.a + m.d, -(m.b - m.c));
    p.t = 0.5 * cd(m.a - m.d, m.b + m.c);
    return p;
}

inline ABCDMatrix abcd_from_params(const SqueezeParams& p) {
    p.validate();
    ABCDMatrix m;
    m.a = (p.k + p.t).real();
    m.c = (p.k + p.t).imag();
    m.d = (p.k - p.t).real();
    m.b = -(p.k - p.t).imag();
    return m;
}

// m1 applied after m2
inline ABCDMatrix compose(const ABCDMatrix& m1, const ABCDMatrix& m2) {
    m1.validate();
    m2.validate();
    return {m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
            m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d};
}

// ---------------------------------------------------------------------------
// Grids and fields
//
// Cell-centered square lattice: x_j = -L + (j + 1/2) h, h = 2L/n. x = 0 is
// never a sample point, so kernel singular points are never hit.

struct GridSpec {
    int n = 0;
    double L = 0;

    GridSpec() = default;
    GridSpec(int n_, double L_) : n(n_), L(L_) { validate(); }

    void validate() const {
        if (n <= 0 || n % 2 != 0) throw InvalidGrid("grid n must be positive and even, got " + std::to_string(n));
        if (!(L > 0)) throw InvalidGrid("grid half-extent must be positive");
    }

    double h() const { return 2.0 * L / n; }
    double x(int j) const { return -L + (j + 0.5) * h(); }
    double cell_area() const { return h() * h(); }

    std::vector<double> points() const {
        std::vector<double> p(n);
        for (int j = 0; j < n; ++j) p[j] = x(j);
        return p;
    }

    bool operator==(const GridSpec& o) const { return n == o.n && L == o.L; }
};

// index (i,j) maps to eta = x_i + i*x_j
struct ComplexField {
    GridSpec spec;
    std::vector<cd> samples;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& s) : spec(s), samples(size_t(s.n) * s.n) {}

    cd& at(int i, int j) { return samples[size_t(i) * spec.n + j]; }
    const cd& at(int i, int j) const { return samples[size_t(i) * spec.n + j]; }
};

struct RealField {
    GridSpec spec;
    std::vector<double> samples;

    RealField() = default;
    explicit RealField(const GridSpec& s) : spec(s), samples(size_t(s.n) * s.n) {}

    double& at(int i, int j) { return samples[size_t(i) * spec.n + j]; }
    const double& at(int i, int j) const { return samples[size_t(i) * spec.n + j]; }
};

// ---------------------------------------------------------------------------
// Analytic beams

struct AnalyticBeam {
    enum class Kind { Gaussian, AngularMode, Superposition };

    Kind kind = Kind::Gaussian;
    cd center{0, 0};
    double width = 1.0;
    int s = 0;
    std::vector<std::pair<cd, AnalyticBeam>> parts;

    static AnalyticBeam gaussian(cd center = {0, 0}, double width = 1.0) {
        AnalyticBeam b;
        b.kind = Kind::Gaussian;
        b.center = center;
        b.width = width;
        b.validate();
        return b;
    }
    static AnalyticBeam angular_mode(int s, double width = 1.0) {
        AnalyticBeam b;
        b.kind = Kind::AngularMode;
        b.s = s;
        b.width = width;
        b.validate();
        return b;
    }
    static AnalyticBeam superposition(std::vector<std::pair<cd, AnalyticBeam>> parts) {
        AnalyticBeam b;
        b.kind = Kind::Superposition;
        b.parts = std::move(parts);
        b.validate();
        return b;
    }

    void validate() const {
        if (kind == Kind::Superposition) {
            if (parts.empty()) throw InvalidParams("superposition must have at least one component");
            for (const auto& p : parts) p.second.validate();
        } else if (!(width > 0)) {
            throw InvalidParams("beam width must be positive");
        }
    }

    cd eval(cd eta) const {
        switch (kind) {
            case Kind::Gaussian: {
                cd d = eta - center;
                return std::exp(-std::norm(d) / (2 * width * width));
            }
            case Kind::AngularMode: {
                double r = std::abs(eta);
                double th = std::arg(eta);
                double radial = std::pow(r / width, std::abs(s)) * std::exp(-r * r / (2 * width * width));
                return radial * std::polar(1.0, s * th);
            }
            case Kind::Superposition: {
                cd acc = 0;
                for (const auto& [coeff, sub] : parts) acc += coeff * sub.eval(eta);
                return acc;
            }
        }
        return 0;
    }
};

inline ComplexField sample_beam(const AnalyticBeam& beam, const GridSpec& spec) {
    spec.validate();
    beam.validate();
    ComplexField f(spec);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.n; ++j) f.at(i, j) = beam.eval(cd(spec.x(i), spec.x(j)));
    return f;
}

// ---------------------------------------------------------------------------
// Deterministic reductions
//
// Fixed-order pairwise summation: bit-reproducible across runs and thread
// counts, and far more accurate than sequential accumulation on long arrays.

template <typename T>
T pairwise_sum(const T* v, size_t n) {
    if (n <= 8) {
        T acc{};
        for (size_t i = 0; i < n; ++i) acc += v[i];
        return acc;
    }
    size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return v.empty() ? T{} : pairwise_sum(v.data(), v.size());
}

// discrete integral of |f|^2 with midpoint weights h^2
inline double field_norm_sq(const ComplexField& f) {
    std::vector<double> sq(f.samples.size());
    for (size_t i = 0; i < f.samples.size(); ++i) sq[i] = std::norm(f.samples[i]);
    return pairwise_sum(sq) * f.spec.cell_area();
}

// ---------------------------------------------------------------------------
// Sampling diagnostics

enum class KernelVariant { Spatial, SpatialSwapped, Frequency };

struct Warning {
    enum class Code { ChirpUndersampled, TruncationLoss, NearSingularB, NearSingularC };
    Code code;
    std::string message;
    double worst_cell_phase = 0;  // radians, for the chirp checks
};

inline const char* warning_name(Warning::Code c) {
    switch (c) {
        case Warning::Code::ChirpUndersampled: return "ChirpUndersampled";
        case Warning::Code::TruncationLoss: return "TruncationLoss";
        case Warning::Code::NearSingularB: return "NearSingularB";
        case Warning::Code::NearSingularC: return "NearSingularC";
    }
    return "?";
}

inline constexpr double singular_threshold = 1e-9;       // hard refusal in kernels
inline constexpr double near_singular_threshold = 1e-8;  // advisory

// Effective (a, b, d) kernel coefficients for each variant: the quadratic
// input chirp a/2b, the coupling 1/b, and the output chirp d/2b.
inline void kernel_coefficients(const ABCDMatrix& m, KernelVariant v, double& a, double& b, double& d) {
    switch (v) {
        case KernelVariant::Spatial: a = m.a; b = m.b; d = m.d; break;
        case KernelVariant::SpatialSwapped: a = m.d; b = -m.b; d = m.a; break;
        case KernelVariant::Frequency: a = m.a; b = m.c; d = m.d; break;
    }
}

inline std::vector<Warning> sampling_diagnostics(const ABCDMatrix& m, const GridSpec& in_spec,
                                                 const GridSpec& out_spec,
                                                 KernelVariant variant = KernelVariant::Spatial) {
    in_spec.validate();
    out_spec.validate();
    double a, b, d;
    kernel_coefficients(m, variant, a, b, d);
    std::vector<Warning> w;
    if (std::abs(b) < near_singular_threshold) {
        auto code = variant == KernelVariant::Frequency ? Warning::Code::NearSingularC
                                                        : Warning::Code::NearSingularB;
        const char* sym = variant == KernelVariant::Frequency ? "C" : "B";
        w.push_back({code, std::string("|") + sym + "| = " + std::to_string(std::abs(b)) +
                               " is below the advisory threshold 1e-8",
                     0});
        return w;  // phase-step bounds are meaningless this close to the delta limit
    }
    double in_step = (std::abs(a) * in_spec.L + out_spec.L) * in_spec.h() / std::abs(b);
    if (in_step > pi)
        w.push_back({Warning::Code::ChirpUndersampled,
                     "kernel phase changes by " + std::to_string(in_step) +
                         " rad between adjacent input cells (limit pi)",
                     in_step});
    double out_step = (std::abs(d) * out_spec.L + in_spec.L) * out_spec.h() / std::abs(b);
    if (out_step > pi)
        w.push_back({Warning::Code::ChirpUndersampled,
                     "kernel phase changes by " + std::to_string(out_step) +
                         " rad between adjacent output cells (limit pi)",
                     out_step});
    if (out_spec.L < std::abs(a) * in_spec.L)
        w.push_back({Warning::Code::TruncationLoss,
                     "output half-extent " + std::to_string(out_spec.L) +
                         " is smaller than the geometric image " + std::to_string(std::abs(a) * in_spec.L) +
                         " of the input window",
                     0});
    return w;
}

// ---------------------------------------------------------------------------
// Parallel loop
//
// Splits [0, count) into contiguous chunks, one worker per chunk. Each index
// must be computed independently (pure per-output-sample work), so results do
// not depend on the worker count. EFRESNEL_THREADS caps the pool.

inline int worker_count() {
    if (const char* env = std::getenv("EFRESNEL_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

template <typename Fn>
void parallel_for(size_t count, Fn&& fn) {
    int workers = worker_count();
    if (workers <= 1 || count < 2) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    if (size_t(workers) > count) workers = int(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    size_t chunk = (count + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        size_t lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace efresnel

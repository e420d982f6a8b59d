#pragma once

/// @file jet.hpp
/// Fourth-order Taylor jets.
///
/// A BasicJet4 carries f, f', f'', f''', f'''' at one point as raw derivative
/// values (not Taylor coefficients divided by k!).  Arithmetic follows the
/// Leibniz rule, elementary functions follow Faa di Bruno's formula truncated
/// at order four.  The scalar type is a template parameter so the same code can
/// run in extended precision; Jet4 is the double instantiation used everywhere
/// else in the library.

#include "ncq/error.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

namespace ncq {

template <class T>
struct BasicJet4 {
    T d0{};
    T d1{};
    T d2{};
    T d3{};
    T d4{};

    constexpr BasicJet4() = default;
    constexpr BasicJet4(T v0, T v1, T v2, T v3, T v4) : d0(v0), d1(v1), d2(v2), d3(v3), d4(v4) {}

    static constexpr BasicJet4 constant(T value) { return {value, T(0), T(0), T(0), T(0)}; }

    /// Derivative of order k (0..4).
    constexpr const T& operator[](int k) const {
        switch (k) {
        case 0: return d0;
        case 1: return d1;
        case 2: return d2;
        case 3: return d3;
        default: return d4;
        }
    }

    constexpr bool is_constant() const { return d1 == T(0) && d2 == T(0) && d3 == T(0) && d4 == T(0); }

    friend constexpr bool operator==(const BasicJet4&, const BasicJet4&) = default;
};

using Jet4 = BasicJet4<double>;

namespace detail {

template <class T>
double as_double(const T& v) {
    return static_cast<double>(v);
}

inline std::string format_value(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace detail

template <class T>
BasicJet4<T> jet_seed_variable(T x0) {
    using std::isfinite;
    if (!isfinite(x0)) {
        throw InvalidInput("jet seed point must be finite, got " + detail::format_value(detail::as_double(x0)));
    }
    return {x0, T(1), T(0), T(0), T(0)};
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

template <class T>
constexpr BasicJet4<T> operator+(const BasicJet4<T>& u, const BasicJet4<T>& v) {
    return {u.d0 + v.d0, u.d1 + v.d1, u.d2 + v.d2, u.d3 + v.d3, u.d4 + v.d4};
}

template <class T>
constexpr BasicJet4<T> operator-(const BasicJet4<T>& u, const BasicJet4<T>& v) {
    return {u.d0 - v.d0, u.d1 - v.d1, u.d2 - v.d2, u.d3 - v.d3, u.d4 - v.d4};
}

template <class T>
constexpr BasicJet4<T> operator-(const BasicJet4<T>& u) {
    return {-u.d0, -u.d1, -u.d2, -u.d3, -u.d4};
}

// (uv)^(k) = sum_j C(k,j) u^(j) v^(k-j)
template <class T>
constexpr BasicJet4<T> operator*(const BasicJet4<T>& u, const BasicJet4<T>& v) {
    return {
        u.d0 * v.d0,
        u.d1 * v.d0 + u.d0 * v.d1,
        u.d2 * v.d0 + T(2) * (u.d1 * v.d1) + u.d0 * v.d2,
        u.d3 * v.d0 + T(3) * (u.d2 * v.d1 + u.d1 * v.d2) + u.d0 * v.d3,
        u.d4 * v.d0 + T(4) * (u.d3 * v.d1 + u.d1 * v.d3) + T(6) * (u.d2 * v.d2) + u.d0 * v.d4,
    };
}

// q = u / v solved order by order from u = q v.
template <class T>
BasicJet4<T> operator/(const BasicJet4<T>& u, const BasicJet4<T>& v) {
    if (v.d0 == T(0)) {
        throw PoleError("division by zero in jet quotient");
    }
    BasicJet4<T> q;
    q.d0 = u.d0 / v.d0;
    q.d1 = (u.d1 - q.d0 * v.d1) / v.d0;
    q.d2 = (u.d2 - T(2) * q.d1 * v.d1 - q.d0 * v.d2) / v.d0;
    q.d3 = (u.d3 - T(3) * q.d2 * v.d1 - T(3) * q.d1 * v.d2 - q.d0 * v.d3) / v.d0;
    q.d4 = (u.d4 - T(4) * q.d3 * v.d1 - T(6) * q.d2 * v.d2 - T(4) * q.d1 * v.d3 - q.d0 * v.d4) / v.d0;
    return q;
}

template <class T>
constexpr BasicJet4<T> operator+(const BasicJet4<T>& u, const T& c) { return u + BasicJet4<T>::constant(c); }
template <class T>
constexpr BasicJet4<T> operator+(const T& c, const BasicJet4<T>& u) { return BasicJet4<T>::constant(c) + u; }
template <class T>
constexpr BasicJet4<T> operator-(const BasicJet4<T>& u, const T& c) { return u - BasicJet4<T>::constant(c); }
template <class T>
constexpr BasicJet4<T> operator-(const T& c, const BasicJet4<T>& u) { return BasicJet4<T>::constant(c) - u; }
template <class T>
constexpr BasicJet4<T> operator*(const BasicJet4<T>& u, const T& c) { return {u.d0 * c, u.d1 * c, u.d2 * c, u.d3 * c, u.d4 * c}; }
template <class T>
constexpr BasicJet4<T> operator*(const T& c, const BasicJet4<T>& u) { return u * c; }
template <class T>
BasicJet4<T> operator/(const BasicJet4<T>& u, const T& c) { return u / BasicJet4<T>::constant(c); }
template <class T>
BasicJet4<T> operator/(const T& c, const BasicJet4<T>& u) { return BasicJet4<T>::constant(c) / u; }

enum class ArithOp { Add, Sub, Mul, Div };

template <class T>
BasicJet4<T> jet_arith(ArithOp op, const BasicJet4<T>& u, const BasicJet4<T>& v) {
    switch (op) {
    case ArithOp::Add: return u + v;
    case ArithOp::Sub: return u - v;
    case ArithOp::Mul: return u * v;
    case ArithOp::Div: return u / v;
    }
    return u;
}

// ---------------------------------------------------------------------------
// Elementary functions
// ---------------------------------------------------------------------------

enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt, Atan, Sinh, Cosh };

inline constexpr Function kAllFunctions[] = {
    Function::Sin, Function::Cos, Function::Tan, Function::Exp, Function::Log,
    Function::Sqrt, Function::Atan, Function::Sinh, Function::Cosh,
};

inline constexpr std::string_view function_name(Function fn) {
    switch (fn) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Tan: return "tan";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sqrt: return "sqrt";
    case Function::Atan: return "atan";
    case Function::Sinh: return "sinh";
    case Function::Cosh: return "cosh";
    }
    return "?";
}

/// Returns false when the name is not one of the supported functions.
inline bool function_from_name(std::string_view name, Function& out) {
    for (Function fn : kAllFunctions) {
        if (function_name(fn) == name) {
            out = fn;
            return true;
        }
    }
    return false;
}

/// |cos(x)| below this is treated as a pole of tan.
inline constexpr double kTanPoleTolerance = 1e-12;

namespace detail {

[[noreturn]] inline void throw_domain(Function fn, double value) {
    throw DomainError(std::string(function_name(fn)) + " is undefined at " + format_value(value));
}

template <class T>
void check_domain(Function fn, const T& x) {
    using std::cos;
    using std::abs;
    switch (fn) {
    case Function::Log:
    case Function::Sqrt:
        if (!(x > T(0))) {
            throw_domain(fn, as_double(x));
        }
        break;
    case Function::Tan:
        if (abs(cos(x)) < T(kTanPoleTolerance)) {
            throw_domain(fn, as_double(x));
        }
        break;
    default:
        break;
    }
}

/// Jet of g(u) given g and its first four derivatives evaluated at u.d0.
template <class T>
BasicJet4<T> compose(const BasicJet4<T>& u, const T& g0, const T& g1, const T& g2, const T& g3, const T& g4) {
    const T u1 = u.d1;
    const T u2 = u.d2;
    const T u3 = u.d3;
    const T u4 = u.d4;
    const T u1sq = u1 * u1;
    return {
        g0,
        g1 * u1,
        g2 * u1sq + g1 * u2,
        g3 * u1sq * u1 + T(3) * g2 * u1 * u2 + g1 * u3,
        g4 * u1sq * u1sq + T(6) * g3 * u1sq * u2 + g2 * (T(3) * u2 * u2 + T(4) * u1 * u3) + g1 * u4,
    };
}

} // namespace detail

/// Plain real evaluation with the same domain rules as the jet path.
template <class T>
T apply_function(Function fn, const T& x) {
    using std::atan;
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    using std::tan;
    detail::check_domain(fn, x);
    switch (fn) {
    case Function::Sin: return sin(x);
    case Function::Cos: return cos(x);
    case Function::Tan: return tan(x);
    case Function::Exp: return exp(x);
    case Function::Log: return log(x);
    case Function::Sqrt: return sqrt(x);
    case Function::Atan: return atan(x);
    case Function::Sinh: return sinh(x);
    case Function::Cosh: return cosh(x);
    }
    return x;
}

template <class T>
BasicJet4<T> jet_univariate(Function fn, const BasicJet4<T>& u) {
    using std::atan;
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    using std::tan;
    const T x = u.d0;
    detail::check_domain(fn, x);
    switch (fn) {
    case Function::Sin: {
        const T s = sin(x), c = cos(x);
        return detail::compose(u, s, c, -s, -c, s);
    }
    case Function::Cos: {
        const T s = sin(x), c = cos(x);
        return detail::compose(u, c, -s, -c, s, c);
    }
    case Function::Tan: {
        const T t = tan(x);
        const T t2 = t * t;
        const T sec2 = T(1) + t2;
        return detail::compose(u, t, sec2, T(2) * t * sec2, T(2) * sec2 * (T(1) + T(3) * t2),
                               T(8) * t * sec2 * (T(2) + T(3) * t2));
    }
    case Function::Exp: {
        const T e = exp(x);
        return detail::compose(u, e, e, e, e, e);
    }
    case Function::Log: {
        const T r = T(1) / x;
        const T r2 = r * r;
        return detail::compose(u, log(x), r, -r2, T(2) * r2 * r, T(-6) * r2 * r2);
    }
    case Function::Sqrt: {
        const T s = sqrt(x);
        const T r = T(1) / x;
        const T g1 = s * r / T(2);
        const T g2 = -g1 * r / T(2);
        const T g3 = T(-3) * g2 * r / T(2);
        const T g4 = T(-5) * g3 * r / T(2);
        return detail::compose(u, s, g1, g2, g3, g4);
    }
    case Function::Atan: {
        const T q = T(1) / (T(1) + x * x);
        const T q2 = q * q;
        return detail::compose(u, atan(x), q, T(-2) * x * q2, (T(6) * x * x - T(2)) * q2 * q,
                               T(24) * x * (T(1) - x * x) * q2 * q2);
    }
    case Function::Sinh: {
        const T sh = sinh(x), ch = cosh(x);
        return detail::compose(u, sh, ch, sh, ch, sh);
    }
    case Function::Cosh: {
        const T sh = sinh(x), ch = cosh(x);
        return detail::compose(u, ch, sh, ch, sh, ch);
    }
    }
    return u;
}

#define NCQ_JET_FUNCTION(name, fn)                                                  \
    template <class T>                                                              \
    BasicJet4<T> name(const BasicJet4<T>& u) { return jet_univariate(Function::fn, u); }

NCQ_JET_FUNCTION(sin, Sin)
NCQ_JET_FUNCTION(cos, Cos)
NCQ_JET_FUNCTION(tan, Tan)
NCQ_JET_FUNCTION(exp, Exp)
NCQ_JET_FUNCTION(log, Log)
NCQ_JET_FUNCTION(sqrt, Sqrt)
NCQ_JET_FUNCTION(atan, Atan)
NCQ_JET_FUNCTION(sinh, Sinh)
NCQ_JET_FUNCTION(cosh, Cosh)

#undef NCQ_JET_FUNCTION

// ---------------------------------------------------------------------------
// Powers
// ---------------------------------------------------------------------------

/// Exponents with |n| above this go through the real-power path.
inline constexpr std::int64_t kMaxIntegerExponent = 1 << 20;

/// Binary exponentiation; works for plain scalars and jets alike so the jet's
/// d0 is bit-identical to the scalar result.
template <class S>
S integer_power(const S& base, std::int64_t n) {
    if (n < 0) {
        const S p = integer_power(base, -n);
        if (p == S(0)) {
            throw PoleError("negative power of zero");
        }
        return S(1) / p;
    }
    S result(1);
    S factor = base;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? factor : result * factor;
            first = false;
        }
        n >>= 1;
        if (n > 0) {
            factor = factor * factor;
        }
    }
    return result;
}

template <class T>
BasicJet4<T> integer_power(const BasicJet4<T>& base, std::int64_t n) {
    if (n < 0) {
        if (base.d0 == T(0)) {
            throw PoleError("negative power of zero");
        }
        return BasicJet4<T>::constant(T(1)) / integer_power(base, -n);
    }
    if (n == 0) {
        return BasicJet4<T>::constant(T(1));
    }
    BasicJet4<T> result;
    BasicJet4<T> factor = base;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? factor : result * factor;
            first = false;
        }
        n >>= 1;
        if (n > 0) {
            factor = factor * factor;
        }
    }
    return result;
}

/// x^y for x > 0 via exp(y log x); d0 is std::pow so it matches the scalar path.
template <class T>
T real_power(const T& base, const T& exponent) {
    using std::pow;
    if (!(base > T(0))) {
        throw DomainError("real power requires a positive base, got " + detail::format_value(detail::as_double(base)));
    }
    return pow(base, exponent);
}

template <class T>
BasicJet4<T> real_power(const BasicJet4<T>& base, const BasicJet4<T>& exponent) {
    using std::pow;
    if (!(base.d0 > T(0))) {
        throw DomainError("real power requires a positive base, got " +
                          detail::format_value(detail::as_double(base.d0)));
    }
    const BasicJet4<T> g = exponent * log(base);
    const T e = pow(base.d0, exponent.d0);
    return detail::compose(g, e, e, e, e, e);
}

} // namespace ncq

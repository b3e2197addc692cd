#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "mpgame/errors.hpp"

namespace mpgame {

// Arbitrary-precision real scalar. Thin RAII wrapper around mpfr_t with two
// house rules on top of MPFR's correctly rounded arithmetic:
//
//   * every value carries its own precision (>= 64 bits, default 256);
//   * binary operations round to the larger of the two operand precisions.
//
// Values are immutable after construction except through assignment, so
// sharing across threads is safe.
class HPReal {
  public:
    static constexpr mpfr_prec_t kMinPrec = 64;
    static constexpr mpfr_prec_t kDefaultPrec = 256;

    HPReal() : HPReal(0L, kDefaultPrec) {}
    HPReal(long value, mpfr_prec_t prec = kDefaultPrec);
    HPReal(int value, mpfr_prec_t prec = kDefaultPrec) : HPReal(static_cast<long>(value), prec) {}
    // The double is taken exactly (no decimal reinterpretation).
    HPReal(double value, mpfr_prec_t prec = kDefaultPrec);

    HPReal(const HPReal& other);
    HPReal(HPReal&& other) noexcept;
    HPReal& operator=(const HPReal& other);
    HPReal& operator=(HPReal&& other) noexcept;
    ~HPReal();

    // Parses a decimal string, correctly rounded to `prec` bits.
    static HPReal from_decimal(const std::string& text, mpfr_prec_t prec = kDefaultPrec);

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    // Copy rounded (or padded) to exactly `prec` bits.
    HPReal with_prec(mpfr_prec_t prec) const;
    // Directed variants, for shrinking an interval endpoint inward safely.
    HPReal with_prec_down(mpfr_prec_t prec) const;
    HPReal with_prec_up(mpfr_prec_t prec) const;

    HPReal operator-() const;
    HPReal operator+(const HPReal& rhs) const;
    HPReal operator-(const HPReal& rhs) const;
    HPReal operator*(const HPReal& rhs) const;
    HPReal operator/(const HPReal& rhs) const;

    HPReal operator*(long rhs) const;
    HPReal operator/(long rhs) const;
    HPReal operator+(long rhs) const;
    HPReal operator-(long rhs) const;

    // Comparisons are exact in the represented values.
    bool operator<(const HPReal& rhs) const { return mpfr_cmp(v_, rhs.v_) < 0; }
    bool operator<=(const HPReal& rhs) const { return mpfr_cmp(v_, rhs.v_) <= 0; }
    bool operator>(const HPReal& rhs) const { return mpfr_cmp(v_, rhs.v_) > 0; }
    bool operator>=(const HPReal& rhs) const { return mpfr_cmp(v_, rhs.v_) >= 0; }
    bool operator==(const HPReal& rhs) const { return mpfr_cmp(v_, rhs.v_) == 0; }
    bool operator!=(const HPReal& rhs) const { return mpfr_cmp(v_, rhs.v_) != 0; }

    bool operator<(long rhs) const { return mpfr_cmp_si(v_, rhs) < 0; }
    bool operator<=(long rhs) const { return mpfr_cmp_si(v_, rhs) <= 0; }
    bool operator>(long rhs) const { return mpfr_cmp_si(v_, rhs) > 0; }
    bool operator>=(long rhs) const { return mpfr_cmp_si(v_, rhs) >= 0; }
    bool operator==(long rhs) const { return mpfr_cmp_si(v_, rhs) == 0; }

    bool is_zero() const { return mpfr_zero_p(v_); }
    int sign() const { return mpfr_sgn(v_); }

    HPReal abs() const;
    HPReal exp() const;
    // Natural log; requires a positive value.
    HPReal log() const;
    HPReal sqrt() const;
    // Largest integer <= value, as a long. Errors if out of long range.
    long floor_long() const;

    // x^e for x >= 0, e arbitrary; 0^e := 0 for e > 0. Negative base throws
    // DomainError. Correct rounding keeps the relative error within half an
    // ulp at the result precision.
    HPReal pow(const HPReal& e) const;

    // 2^k at this value's precision, exact for any representable exponent.
    static HPReal pow2(long k, mpfr_prec_t prec = kDefaultPrec);

    // Decimal string with enough digits that parsing at the same precision
    // recovers the value bit for bit.
    std::string to_decimal() const;
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    // Directed-rounding helpers used where a one-sided guarantee matters
    // (strategy move construction, certified endpoint bounds).
    static HPReal add_down(const HPReal& a, const HPReal& b);
    static HPReal add_up(const HPReal& a, const HPReal& b);
    static HPReal sub_down(const HPReal& a, const HPReal& b);
    static HPReal sub_up(const HPReal& a, const HPReal& b);
    static HPReal mul_up(const HPReal& a, const HPReal& b);

    // Raw access for the few routines that drive mpfr directly.
    mpfr_srcptr raw() const { return v_; }
    mpfr_ptr raw() { return v_; }

  private:
    struct RawTag {};
    // Zero at the given precision; the internal allocation path.
    HPReal(RawTag, mpfr_prec_t prec);
    static mpfr_prec_t checked(mpfr_prec_t prec);
    static mpfr_prec_t join(const HPReal& a, const HPReal& b);
    mpfr_t v_;
};

inline HPReal operator*(long lhs, const HPReal& rhs) { return rhs * lhs; }
inline HPReal operator-(long lhs, const HPReal& rhs) { return HPReal(lhs, rhs.prec()) - rhs; }
inline HPReal operator+(long lhs, const HPReal& rhs) { return rhs + lhs; }
inline HPReal operator/(long lhs, const HPReal& rhs) { return HPReal(lhs, rhs.prec()) / rhs; }

HPReal min(const HPReal& a, const HPReal& b);
HPReal max(const HPReal& a, const HPReal& b);

}  // namespace mpgame

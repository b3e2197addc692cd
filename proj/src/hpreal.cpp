#include "mpgame/hpreal.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace mpgame {

mpfr_prec_t HPReal::checked(mpfr_prec_t prec) {
    if (prec < kMinPrec)
        throw DomainError("precision below 64-bit floor: " + std::to_string(prec));
    return prec;
}

mpfr_prec_t HPReal::join(const HPReal& a, const HPReal& b) {
    return std::max(a.prec(), b.prec());
}

HPReal::HPReal(RawTag, mpfr_prec_t prec) {
    mpfr_init2(v_, checked(prec));
    mpfr_set_zero(v_, 1);
}

HPReal::HPReal(long value, mpfr_prec_t prec) {
    mpfr_init2(v_, checked(prec));
    mpfr_set_si(v_, value, MPFR_RNDN);
}

HPReal::HPReal(double value, mpfr_prec_t prec) {
    mpfr_init2(v_, checked(prec));
    mpfr_set_d(v_, value, MPFR_RNDN);
}

HPReal::HPReal(const HPReal& other) {
    mpfr_init2(v_, other.prec());
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

HPReal::HPReal(HPReal&& other) noexcept {
    mpfr_init2(v_, kMinPrec);
    mpfr_swap(v_, other.v_);
}

HPReal& HPReal::operator=(const HPReal& other) {
    if (this != &other) {
        mpfr_set_prec(v_, other.prec());
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
}

HPReal& HPReal::operator=(HPReal&& other) noexcept {
    if (this != &other) mpfr_swap(v_, other.v_);
    return *this;
}

HPReal::~HPReal() { mpfr_clear(v_); }

HPReal HPReal::from_decimal(const std::string& text, mpfr_prec_t prec) {
    HPReal out(RawTag{}, prec);
    if (mpfr_set_str(out.v_, text.c_str(), 10, MPFR_RNDN) != 0)
        throw DomainError("unparseable decimal: '" + text + "'");
    return out;
}

HPReal HPReal::with_prec(mpfr_prec_t prec) const {
    HPReal out(RawTag{}, prec);
    mpfr_set(out.v_, v_, MPFR_RNDN);
    return out;
}

HPReal HPReal::with_prec_down(mpfr_prec_t prec) const {
    HPReal out(RawTag{}, prec);
    mpfr_set(out.v_, v_, MPFR_RNDD);
    return out;
}

HPReal HPReal::with_prec_up(mpfr_prec_t prec) const {
    HPReal out(RawTag{}, prec);
    mpfr_set(out.v_, v_, MPFR_RNDU);
    return out;
}

HPReal HPReal::operator-() const {
    HPReal out(RawTag{}, prec());
    mpfr_neg(out.v_, v_, MPFR_RNDN);
    return out;
}

#define MPGAME_BINOP(name, fn)                              \
    HPReal HPReal::operator name(const HPReal& rhs) const { \
        HPReal out(RawTag{}, join(*this, rhs));                       \
        fn(out.v_, v_, rhs.v_, MPFR_RNDN);                  \
        return out;                                         \
    }
MPGAME_BINOP(+, mpfr_add)
MPGAME_BINOP(-, mpfr_sub)
MPGAME_BINOP(*, mpfr_mul)
MPGAME_BINOP(/, mpfr_div)
#undef MPGAME_BINOP

HPReal HPReal::operator*(long rhs) const {
    HPReal out(RawTag{}, prec());
    mpfr_mul_si(out.v_, v_, rhs, MPFR_RNDN);
    return out;
}

HPReal HPReal::operator/(long rhs) const {
    HPReal out(RawTag{}, prec());
    mpfr_div_si(out.v_, v_, rhs, MPFR_RNDN);
    return out;
}

HPReal HPReal::operator+(long rhs) const {
    HPReal out(RawTag{}, prec());
    mpfr_add_si(out.v_, v_, rhs, MPFR_RNDN);
    return out;
}

HPReal HPReal::operator-(long rhs) const {
    HPReal out(RawTag{}, prec());
    mpfr_sub_si(out.v_, v_, rhs, MPFR_RNDN);
    return out;
}

HPReal HPReal::abs() const {
    HPReal out(RawTag{}, prec());
    mpfr_abs(out.v_, v_, MPFR_RNDN);
    return out;
}

HPReal HPReal::exp() const {
    HPReal out(RawTag{}, prec());
    mpfr_exp(out.v_, v_, MPFR_RNDN);
    return out;
}

HPReal HPReal::log() const {
    if (mpfr_sgn(v_) <= 0) throw DomainError("log of nonpositive value");
    HPReal out(RawTag{}, prec());
    mpfr_log(out.v_, v_, MPFR_RNDN);
    return out;
}

HPReal HPReal::sqrt() const {
    if (mpfr_sgn(v_) < 0) throw DomainError("sqrt of negative value");
    HPReal out(RawTag{}, prec());
    mpfr_sqrt(out.v_, v_, MPFR_RNDN);
    return out;
}

long HPReal::floor_long() const {
    HPReal f(RawTag{}, prec());
    mpfr_floor(f.v_, v_);
    if (!mpfr_fits_slong_p(f.v_, MPFR_RNDN)) throw DomainError("floor out of long range");
    return mpfr_get_si(f.v_, MPFR_RNDN);
}

HPReal HPReal::pow(const HPReal& e) const {
    int s = mpfr_sgn(v_);
    if (s < 0) throw DomainError("negative base in pow");
    HPReal out(RawTag{}, join(*this, e));
    if (s == 0) {
        if (mpfr_sgn(e.v_) <= 0) throw DomainError("0 raised to a nonpositive power");
        mpfr_set_zero(out.v_, 1);
        return out;
    }
    mpfr_pow(out.v_, v_, e.v_, MPFR_RNDN);
    return out;
}

HPReal HPReal::pow2(long k, mpfr_prec_t prec) {
    HPReal out(RawTag{}, prec);
    mpfr_set_si_2exp(out.v_, 1, k, MPFR_RNDN);
    return out;
}

std::string HPReal::to_decimal() const {
    // ceil(prec * log10(2)) + 2 digits pin the value uniquely, so a
    // correctly rounded parse at the same precision is an exact round trip.
    auto digits = static_cast<int>(std::ceil(static_cast<double>(prec()) * 0.30103)) + 2;
    std::vector<char> buf(static_cast<size_t>(digits) + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v_);
    return std::string(buf.data());
}

#define MPGAME_DIRECTED(name, fn, mode)                        \
    HPReal HPReal::name(const HPReal& a, const HPReal& b) {    \
        HPReal out(RawTag{}, join(a, b));                                \
        fn(out.v_, a.v_, b.v_, mode);                          \
        return out;                                            \
    }
MPGAME_DIRECTED(add_down, mpfr_add, MPFR_RNDD)
MPGAME_DIRECTED(add_up, mpfr_add, MPFR_RNDU)
MPGAME_DIRECTED(sub_down, mpfr_sub, MPFR_RNDD)
MPGAME_DIRECTED(sub_up, mpfr_sub, MPFR_RNDU)
MPGAME_DIRECTED(mul_up, mpfr_mul, MPFR_RNDU)
#undef MPGAME_DIRECTED

HPReal min(const HPReal& a, const HPReal& b) { return a <= b ? a : b; }
HPReal max(const HPReal& a, const HPReal& b) { return a >= b ? a : b; }

}  // namespace mpgame

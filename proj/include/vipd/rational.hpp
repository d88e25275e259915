#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "vipd/errors.hpp"

namespace vipd {

// Exact rational on int64 with overflow-checked arithmetic. Food-web weights
// have tiny denominators, so int64 is plenty; overflow throws rather than
// silently wrapping.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rational operator+(const Rational& o) const {
        __int128 n = (__int128)num_ * o.den_ + (__int128)o.num_ * den_;
        __int128 d = (__int128)den_ * o.den_;
        return make_checked(n, d);
    }
    Rational operator-(const Rational& o) const {
        __int128 n = (__int128)num_ * o.den_ - (__int128)o.num_ * den_;
        __int128 d = (__int128)den_ * o.den_;
        return make_checked(n, d);
    }
    Rational operator*(const Rational& o) const {
        return make_checked((__int128)num_ * o.num_, (__int128)den_ * o.den_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return (__int128)num_ * o.den_ < (__int128)o.num_ * den_;
    }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Accepts "3", "0.5", ".25", or "p/q". Exact: decimals become p/10^d.
    static Rational parse(const std::string& tok) {
        if (tok.empty()) throw ParseError("empty rational literal");
        auto slash = tok.find('/');
        if (slash != std::string::npos) {
            std::int64_t p = parse_int(tok.substr(0, slash), tok);
            std::int64_t q = parse_int(tok.substr(slash + 1), tok);
            if (q == 0) throw ParseError("zero denominator in '" + tok + "'");
            return Rational(p, q);
        }
        auto dot = tok.find('.');
        if (dot == std::string::npos) return Rational(parse_int(tok, tok));
        std::string ip = tok.substr(0, dot);
        std::string fp = tok.substr(dot + 1);
        if (fp.empty()) throw ParseError("malformed decimal '" + tok + "'");
        bool neg = !ip.empty() && ip[0] == '-';
        std::int64_t whole = ip.empty() || ip == "-" ? 0 : parse_int(ip, tok);
        std::int64_t den = 1;
        std::int64_t frac = 0;
        for (char c : fp) {
            if (c < '0' || c > '9') throw ParseError("malformed decimal '" + tok + "'");
            if (den > (std::int64_t)1e17) throw ParseError("decimal too long '" + tok + "'");
            den *= 10;
            frac = frac * 10 + (c - '0');
        }
        __int128 n = (__int128)whole * den + (neg ? -(__int128)frac : (__int128)frac);
        return make_checked(n, den);
    }

private:
    static std::int64_t parse_int(const std::string& s, const std::string& whole) {
        if (s.empty()) throw ParseError("malformed number '" + whole + "'");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw ParseError("malformed number '" + whole + "'");
        std::int64_t v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw ParseError("malformed number '" + whole + "'");
            if (v > (std::int64_t)9e17) throw ParseError("number too large '" + whole + "'");
            v = v * 10 + (s[i] - '0');
        }
        return s[0] == '-' ? -v : v;
    }

    static Rational make_checked(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw InputError("rational arithmetic overflow");
        Rational r;
        r.num_ = (std::int64_t)n;
        r.den_ = (std::int64_t)d;
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b) { __int128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        if (den_ == 0) throw InputError("zero denominator");
        *this = make_checked(num_, den_);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace vipd

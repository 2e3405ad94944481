// Exact rational scalar type (GMP-backed) and small helpers used everywhere.
#ifndef FILLVOL_RATIONAL_HPP
#define FILLVOL_RATIONAL_HPP

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fillvol {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

inline Int floor_int(const Rat& q) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return f;
}

inline Int ceil_int(const Rat& q) {
    Int c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return c;
}

inline Rat abs_rat(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline Rat pow_rat(const Rat& base, unsigned e) {
    Rat r(1);
    for (unsigned i = 0; i < e; ++i) r *= base;
    return r;
}

// Parses "p/q" or "p"; exact, rejects garbage.
inline Rat parse_rat(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rat& q) { return q.get_str(); }

// Checked narrowing for positions/coefficients that must fit machine ints.
inline long to_long(const Int& z) {
    if (!z.fits_slong_p()) throw std::overflow_error("integer out of range");
    return z.get_si();
}

} // namespace fillvol

#endif

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fitheight {

/// Exact group and subgroup orders. Wreath towers overflow 64 bits quickly.
using Order = boost::multiprecision::cpp_int;

using Prime = unsigned;
using PrimeSet = std::set<Prime>;

bool is_prime(std::uint64_t n);

/// Prime factorisation of n as (prime, multiplicity) pairs, primes ascending.
std::vector<std::pair<Prime, unsigned>> factorize(std::uint64_t n);

/// Distinct primes dividing n by trial division. Group orders here are
/// products of small primes, so this terminates quickly even for huge n.
PrimeSet prime_divisors(const Order& n);

/// Largest divisor of n whose prime factors all lie in sigma.
Order sigma_part(Order n, const PrimeSet& sigma);

Order gcd(const Order& a, const Order& b);

/// Inverse of a modulo m; requires gcd(a, m) == 1.
Order mod_inverse(const Order& a, const Order& m);

std::string to_string(const Order& n);

/// Set difference `all \ sigma`.
PrimeSet complement(const PrimeSet& all, const PrimeSet& sigma);

PrimeSet intersect(const PrimeSet& a, const PrimeSet& b);

std::string to_string(const PrimeSet& primes);

}  // namespace fitheight

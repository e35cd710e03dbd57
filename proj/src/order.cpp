#include "fitheight/order.hpp"

#include <algorithm>
#include <stdexcept>

namespace fitheight {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<Prime, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<Prime, unsigned>> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    unsigned k = 0;
    while (n % d == 0) {
      n /= d;
      ++k;
    }
    if (k) out.emplace_back(static_cast<Prime>(d), k);
  }
  if (n > 1) out.emplace_back(static_cast<Prime>(n), 1);
  return out;
}

PrimeSet prime_divisors(const Order& n) {
  if (n < 1) throw std::invalid_argument("prime_divisors: non-positive order");
  PrimeSet out;
  Order m = n;
  for (std::uint64_t d = 2; m > 1; ++d) {
    if (Order(d) * d > m) {
      if (m > std::numeric_limits<std::uint32_t>::max())
        throw std::domain_error("prime_divisors: cofactor too large: " + to_string(m));
      out.insert(static_cast<Prime>(m));
      break;
    }
    if (m % d == 0) {
      out.insert(static_cast<Prime>(d));
      while (m % d == 0) m /= d;
    }
  }
  return out;
}

Order sigma_part(Order n, const PrimeSet& sigma) {
  Order part = 1;
  for (Prime p : sigma) {
    while (n % p == 0) {
      n /= p;
      part *= p;
    }
  }
  return part;
}

Order gcd(const Order& a, const Order& b) { return boost::multiprecision::gcd(a, b); }

Order mod_inverse(const Order& a, const Order& m) {
  if (m == 1) return 0;
  Order old_r = a % m, r = m, old_s = 1, s = 0;
  if (old_r < 0) old_r += m;
  while (r != 0) {
    Order q = old_r / r;
    Order t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw std::domain_error("mod_inverse: not invertible");
  old_s %= m;
  if (old_s < 0) old_s += m;
  return old_s;
}

std::string to_string(const Order& n) { return n.str(); }

PrimeSet complement(const PrimeSet& all, const PrimeSet& sigma) {
  PrimeSet out;
  std::set_difference(all.begin(), all.end(), sigma.begin(), sigma.end(),
                      std::inserter(out, out.end()));
  return out;
}

PrimeSet intersect(const PrimeSet& a, const PrimeSet& b) {
  PrimeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::string to_string(const PrimeSet& primes) {
  std::string s;
  for (Prime p : primes) {
    if (!s.empty()) s += ',';
    s += std::to_string(p);
  }
  return s;
}

}  // namespace fitheight

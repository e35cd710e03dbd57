#pragma once

#include <vector>

#include "fitheight/subgroup.hpp"

namespace fitheight {

/// G/N with the natural projection. The quotient presentation uses the
/// generators of G whose index is not a leading depth of N.
class Quotient {
 public:
  const GroupPtr& source() const { return source_; }
  const GroupPtr& image() const { return image_; }
  const Subgroup& kernel() const { return kernel_; }
  /// kept[k] = index in G of quotient generator k.
  const std::vector<std::size_t>& kept() const { return kept_; }

  Element project(const Element& x) const;
  /// Normal-form preimage with zeros at the kernel's leading depths.
  Element lift(const Element& y) const;
  Subgroup image_of(const Subgroup& h) const;
  Subgroup preimage(const Subgroup& u) const;

 private:
  friend Quotient quotient(const Subgroup& n);
  GroupPtr source_;
  GroupPtr image_;
  Subgroup kernel_;
  std::vector<std::size_t> kept_;
};

/// Builds G/N. Throws PreconditionError when N is not normal.
Quotient quotient(const Subgroup& n);

}  // namespace fitheight

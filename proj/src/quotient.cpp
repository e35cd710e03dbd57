#include "fitheight/quotient.hpp"

#include "fitheight/errors.hpp"

namespace fitheight {

Element Quotient::project(const Element& x) const {
  const Element rep = coset_representative(kernel_, x);
  Element y = image_->identity();
  for (std::size_t k = 0; k < kept_.size(); ++k) y.exps[k] = rep.exps[kept_[k]];
  return y;
}

Element Quotient::lift(const Element& y) const {
  image_->check(y);
  Element x = source_->identity();
  for (std::size_t k = 0; k < kept_.size(); ++k) x.exps[kept_[k]] = y.exps[k];
  return x;
}

Subgroup Quotient::image_of(const Subgroup& h) const {
  std::vector<Element> gens;
  gens.reserve(h.igs().size());
  for (const auto& x : h.igs()) gens.push_back(project(x));
  return induced_pcgs(image_, gens);
}

Subgroup Quotient::preimage(const Subgroup& u) const {
  if (u.ambient()->id() != image_->id()) throw PreconditionError("preimage: subgroup not in the quotient");
  IgsBuilder b(kernel_);
  for (const auto& y : u.igs()) b.add(lift(y));
  return b.finish();
}

Quotient quotient(const Subgroup& n) {
  if (!is_normal(n)) throw PreconditionError("quotient: subgroup is not normal");
  const GroupPtr& g = n.ambient();
  Quotient q;
  q.source_ = g;
  q.kernel_ = n;

  std::vector<bool> in_kernel(g->size(), false);
  for (std::size_t d : n.depths()) in_kernel[d] = true;
  std::vector<int> position(g->size(), -1);
  std::vector<Prime> rel;
  for (std::size_t i = 0; i < g->size(); ++i)
    if (!in_kernel[i]) {
      position[i] = static_cast<int>(q.kept_.size());
      q.kept_.push_back(i);
      rel.push_back(g->relative_order(i));
    }

  auto restrict = [&](const Element& x) {
    const Element rep = coset_representative(n, x);
    std::vector<int> v(q.kept_.size(), 0);
    for (std::size_t k = 0; k < q.kept_.size(); ++k) v[k] = rep.exps[q.kept_[k]];
    return v;
  };

  PcPresentation pres(rel);
  for (std::size_t a = 0; a < q.kept_.size(); ++a) {
    const std::size_t i = q.kept_[a];
    pres.set_power(a, restrict(g->power_relation(i)));
    for (std::size_t b = a + 1; b < q.kept_.size(); ++b) {
      const std::size_t j = q.kept_[b];
      if (g->commute(i, j)) continue;
      pres.set_conjugate(a, b, restrict(g->conjugate_relation(i, j)));
    }
  }
  q.image_ = pres.build();
  return q;
}

}  // namespace fitheight

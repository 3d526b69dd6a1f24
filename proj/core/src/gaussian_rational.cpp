#include "effcon/gaussian_rational.hpp"

#include <functional>

#include "effcon/error.hpp"

namespace effcon {

GaussianRational GaussianRational::frac(long n, long d) {
  if (d == 0) throw Error("zero divisor");
  mpq_class q(n, d);
  q.canonicalize();
  return {q, 0};
}

GaussianRational GaussianRational::inverse() const {
  if (is_zero()) throw Error("zero divisor");
  if (is_real()) return {1 / re_, 0};
  mpq_class n = re_ * re_ + im_ * im_;
  return {re_ / n, -im_ / n};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  if (sgn(o.im_) != 0) im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  if (sgn(o.im_) != 0) im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (is_real() && o.is_real()) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class r = re_ * o.re_ - im_ * o.im_;
  mpq_class i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  return *this *= o.inverse();
}

std::size_t GaussianRational::hash() const {
  std::hash<std::string> h;
  std::size_t a = h(re_.get_str());
  return a * 1000003u ^ h(im_.get_str());
}

std::string GaussianRational::str() const {
  if (is_real()) return re_.get_str();
  std::string s = sgn(re_) != 0 ? re_.get_str() : "";
  if (sgn(re_) != 0) s += sgn(im_) < 0 ? " - " : " + ";
  else if (sgn(im_) < 0) s += "-";
  mpq_class a = abs(im_);
  if (a.get_num() != 1) s += a.get_num().get_str() + "*";
  s += "i";
  if (a.get_den() != 1) s += "/" + a.get_den().get_str();
  return s;
}

}  // namespace effcon

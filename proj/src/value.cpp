#include "ausk/value.hpp"

#include <sstream>

namespace ausk {

struct Value::Rep {
  Tag tag = Tag::Unit;
  std::string label;
  std::vector<Value> kids;
  int weight = 1;
};

const std::shared_ptr<const Value::Rep>& Value::unit_rep() {
  static const auto rep = std::make_shared<const Rep>();
  return rep;
}

Value::Value() : rep_(unit_rep()) {}

Value Value::atom(std::string name) {
  auto r = std::make_shared<Rep>();
  r->tag = Tag::Atom;
  r->label = std::move(name);
  return Value(std::move(r));
}

Value Value::unit() { return Value(unit_rep()); }

Value Value::pair(Value a, Value b) {
  auto r = std::make_shared<Rep>();
  r->tag = Tag::Pair;
  r->weight = a.weight() + b.weight();
  r->kids.push_back(std::move(a));
  r->kids.push_back(std::move(b));
  return Value(std::move(r));
}

Value Value::inj_l(Value v) {
  auto r = std::make_shared<Rep>();
  r->tag = Tag::InjL;
  r->weight = v.weight();
  r->kids.push_back(std::move(v));
  return Value(std::move(r));
}

Value Value::inj_r(Value v) {
  auto r = std::make_shared<Rep>();
  r->tag = Tag::InjR;
  r->weight = v.weight();
  r->kids.push_back(std::move(v));
  return Value(std::move(r));
}

Value Value::list(std::vector<Value> items) {
  auto r = std::make_shared<Rep>();
  r->tag = Tag::List;
  r->weight = 0;
  for (const Value& v : items) r->weight += v.weight();
  r->kids = std::move(items);
  return Value(std::move(r));
}

Value Value::tagged(std::string label, Value v) {
  auto r = std::make_shared<Rep>();
  r->tag = Tag::Tagged;
  r->label = std::move(label);
  r->weight = v.weight();
  r->kids.push_back(std::move(v));
  return Value(std::move(r));
}

Value Value::class_rep(Value least_member) {
  auto r = std::make_shared<Rep>();
  r->tag = Tag::ClassRep;
  r->weight = least_member.weight();
  r->kids.push_back(std::move(least_member));
  return Value(std::move(r));
}

Value::Tag Value::tag() const { return rep_->tag; }
const std::string& Value::label() const { return rep_->label; }
const std::vector<Value>& Value::kids() const { return rep_->kids; }
const Value& Value::kid(size_t i) const { return rep_->kids[i]; }
size_t Value::arity() const { return rep_->kids.size(); }
int Value::weight() const { return rep_->weight; }

bool Value::operator==(const Value& o) const {
  if (rep_ == o.rep_) return true;
  if (rep_->tag != o.rep_->tag || rep_->label != o.rep_->label ||
      rep_->kids.size() != o.rep_->kids.size() || rep_->weight != o.rep_->weight)
    return false;
  for (size_t i = 0; i < rep_->kids.size(); ++i)
    if (!(rep_->kids[i] == o.rep_->kids[i])) return false;
  return true;
}

std::strong_ordering Value::operator<=>(const Value& o) const {
  if (rep_ == o.rep_) return std::strong_ordering::equal;
  if (auto c = static_cast<int>(rep_->tag) <=> static_cast<int>(o.rep_->tag); c != 0) return c;
  if (auto c = rep_->label <=> o.rep_->label; c != 0) return c;
  if (auto c = rep_->kids.size() <=> o.rep_->kids.size(); c != 0) return c;
  for (size_t i = 0; i < rep_->kids.size(); ++i)
    if (auto c = rep_->kids[i] <=> o.rep_->kids[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string Value::text() const {
  std::ostringstream os;
  switch (tag()) {
    case Tag::Atom:
      os << label();
      break;
    case Tag::Unit:
      os << "()";
      break;
    case Tag::Pair:
      os << "(" << kid(0).text() << ", " << kid(1).text() << ")";
      break;
    case Tag::InjL:
      os << "inl " << kid(0).text();
      break;
    case Tag::InjR:
      os << "inr " << kid(0).text();
      break;
    case Tag::List: {
      os << "[";
      for (size_t i = 0; i < kids().size(); ++i) {
        if (i) os << ", ";
        os << kids()[i].text();
      }
      os << "]";
      break;
    }
    case Tag::Tagged:
      os << "tag(" << label() << ", " << kid(0).text() << ")";
      break;
    case Tag::ClassRep:
      os << "cls(" << kid(0).text() << ")";
      break;
  }
  return os.str();
}

}  // namespace ausk

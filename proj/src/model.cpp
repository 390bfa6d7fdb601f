#include "bt/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "bt/syntax.hpp"
#include "bt/wellformed.hpp"

namespace bt {

Rat rat(long long num, long long den) {
  if (den == 0) throw BtError("rational with denominator zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rat{num, den};
}

Rat operator+(Rat a, Rat b) {
  return rat(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rat operator*(Rat a, Rat b) { return rat(a.num * b.num, a.den * b.den); }

std::string to_string(const Rat& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string to_string(const Scalar& s) {
  if (const auto* i = std::get_if<long long>(&s)) return std::to_string(*i);
  if (const auto* r = std::get_if<Rat>(&s)) return to_string(*r);
  std::ostringstream os;
  os << std::get<double>(s);
  return os.str();
}

std::string arity_word(const Generator& g) {
  std::string w;
  w.reserve(g.edges.size());
  for (const EdgeItem& it : g.edges) {
    const auto* e = std::get_if<DirectedEdge>(&it.v);
    if (!e)
      throw BtError("generator " + g.name + " still carries a group marker");
    w += e->dir == Dir::Out ? '^' : 'v';
  }
  return w;
}

void Model::assign(const std::string& gen, const std::string& word,
                   std::vector<Rat> data) {
  size_t want = 1;
  for (size_t i = 0; i < word.size(); ++i) want *= size_t(dim);
  if (data.size() != want)
    throw ArityMismatch(gen + " " + word + ": expected " +
                        std::to_string(want) + " entries, got " +
                        std::to_string(data.size()));
  gens[{gen, word}] = std::move(data);
}

namespace {

// Dense tensor over named axes, every axis of dimension d, row-major.
template <typename T>
struct Tens {
  std::vector<EdgeName> axes;
  std::vector<T> data;
};

size_t pow_sz(int d, size_t n) {
  size_t r = 1;
  while (n--) r *= size_t(d);
  return r;
}

// Row-major odometer step; callers pair it with a flat counter.
void bump(std::vector<int>& idx, int d) {
  for (size_t k = idx.size(); k-- > 0;) {
    if (++idx[k] < d) return;
    idx[k] = 0;
  }
}

// Sums out every axis name that occurs twice.
template <typename T>
Tens<T> collapse(const Tens<T>& t, int d) {
  for (size_t i = 0; i < t.axes.size(); ++i)
    for (size_t j = i + 1; j < t.axes.size(); ++j)
      if (t.axes[i] == t.axes[j]) {
        Tens<T> out;
        std::vector<size_t> keep;
        for (size_t k = 0; k < t.axes.size(); ++k)
          if (k != i && k != j) {
            keep.push_back(k);
            out.axes.push_back(t.axes[k]);
          }
        out.data.assign(pow_sz(d, out.axes.size()), T{});
        std::vector<int> idx(t.axes.size(), 0);
        for (size_t flat = 0; flat < t.data.size(); ++flat, bump(idx, d)) {
          if (idx[i] != idx[j]) continue;
          size_t pos = 0;
          for (size_t k : keep) pos = pos * size_t(d) + size_t(idx[k]);
          out.data[pos] = out.data[pos] + t.data[flat];
        }
        return collapse(out, d);
      }
  return t;
}

// Multiplies and sums over the shared names. Both sides must already have
// unique axes, so every name occurs at most once per side.
template <typename T>
Tens<T> contract(const Tens<T>& a, const Tens<T>& b, int d) {
  std::vector<EdgeName> shared;
  for (const EdgeName& n : a.axes)
    if (std::find(b.axes.begin(), b.axes.end(), n) != b.axes.end())
      shared.push_back(n);
  Tens<T> out;
  for (const EdgeName& n : a.axes)
    if (std::find(shared.begin(), shared.end(), n) == shared.end())
      out.axes.push_back(n);
  for (const EdgeName& n : b.axes)
    if (std::find(shared.begin(), shared.end(), n) == shared.end())
      out.axes.push_back(n);
  out.data.assign(pow_sz(d, out.axes.size()), T{});

  struct Src {
    bool from_shared;
    size_t slot;
  };
  auto locate = [&](const std::vector<EdgeName>& axes) {
    std::vector<Src> src;
    for (const EdgeName& n : axes) {
      auto s = std::find(shared.begin(), shared.end(), n);
      if (s != shared.end()) {
        src.push_back({true, size_t(s - shared.begin())});
      } else {
        auto o = std::find(out.axes.begin(), out.axes.end(), n);
        src.push_back({false, size_t(o - out.axes.begin())});
      }
    }
    return src;
  };
  std::vector<Src> sa = locate(a.axes), sb = locate(b.axes);

  size_t stotal = pow_sz(d, shared.size());
  std::vector<int> ov(out.axes.size(), 0);
  for (size_t flat = 0; flat < out.data.size(); ++flat, bump(ov, d)) {
    T acc{};
    std::vector<int> sv(shared.size(), 0);
    for (size_t s = 0; s < stotal; ++s, bump(sv, d)) {
      size_t pa = 0, pb = 0;
      for (const Src& k : sa)
        pa = pa * size_t(d) + size_t(k.from_shared ? sv[k.slot] : ov[k.slot]);
      for (const Src& k : sb)
        pb = pb * size_t(d) + size_t(k.from_shared ? sv[k.slot] : ov[k.slot]);
      acc = acc + a.data[pa] * b.data[pb];
    }
    out.data[flat] = acc;
  }
  return out;
}

// Reorders the axes lexicographically, permuting the data to match.
template <typename T>
Tens<T> sort_axes(const Tens<T>& t, int d) {
  if (std::is_sorted(t.axes.begin(), t.axes.end())) return t;
  std::vector<size_t> perm(t.axes.size());
  std::iota(perm.begin(), perm.end(), size_t(0));
  std::sort(perm.begin(), perm.end(),
            [&](size_t x, size_t y) { return t.axes[x] < t.axes[y]; });
  Tens<T> out;
  for (size_t k : perm) out.axes.push_back(t.axes[k]);
  out.data.assign(t.data.size(), T{});
  std::vector<int> idx(t.axes.size(), 0);
  for (size_t flat = 0; flat < t.data.size(); ++flat, bump(idx, d)) {
    size_t pos = 0;
    for (size_t k : perm) pos = pos * size_t(d) + size_t(idx[k]);
    out.data[pos] = t.data[flat];
  }
  return out;
}

template <typename T, typename Conv>
Tens<T> eval_engine(const TensorExpr& t, const Model& m, Conv conv) {
  const int d = m.dim;
  Tens<T> acc;
  acc.data = {conv(rat(1))};
  for (const Factor& f : t.factors) {
    Tens<T> cur;
    if (std::holds_alternative<Empty>(f.v)) {
      continue;
    } else if (const auto* w = std::get_if<IdWire>(&f.v)) {
      cur.axes = {w->out, w->in};
      cur.data.assign(size_t(d) * size_t(d), T{});
      for (int i = 0; i < d; ++i)
        cur.data[size_t(i) * size_t(d) + size_t(i)] = conv(rat(1));
    } else if (const auto* g = std::get_if<Generator>(&f.v)) {
      std::string word = arity_word(*g);
      auto it = m.gens.find({g->name, word});
      if (it == m.gens.end())
        throw MissingAssignment("no entries for " + g->name + " " +
                                (word.empty() ? "(no legs)" : word));
      for (const EdgeItem& e : g->edges)
        cur.axes.push_back(std::get<DirectedEdge>(e.v).name);
      cur.data.reserve(it->second.size());
      for (const Rat& r : it->second) cur.data.push_back(conv(r));
    } else {
      throw IllFormed("a box has no value");
    }
    acc = contract(acc, collapse(cur, d), d);
  }
  return sort_axes(acc, d);
}

}  // namespace

TensorValue evaluate(const TensorExpr& t, const Model& m) {
  if (m.dim < 1) throw BtError("model dimension must be positive");
  if (!is_concrete(t)) throw IllFormed("only concrete terms have a value");
  require_wellformed(t);
  TensorValue v;
  v.dim = m.dim;
  switch (m.semiring) {
    case Semiring::Int: {
      Tens<long long> r = eval_engine<long long>(t, m, [](const Rat& q) {
        if (q.den != 1)
          throw BtError("integer model holds the fraction " + to_string(q));
        return q.num;
      });
      v.axes = std::move(r.axes);
      for (long long x : r.data) v.data.push_back(x);
      break;
    }
    case Semiring::Rat: {
      Tens<Rat> r = eval_engine<Rat>(t, m, [](const Rat& q) { return q; });
      v.axes = std::move(r.axes);
      for (const Rat& x : r.data) v.data.push_back(x);
      break;
    }
    case Semiring::Float: {
      Tens<double> r = eval_engine<double>(t, m, [](const Rat& q) {
        return double(q.num) / double(q.den);
      });
      v.axes = std::move(r.axes);
      for (double x : r.data) v.data.push_back(x);
      break;
    }
  }
  return v;
}

namespace {

std::string format_slot(const TensorValue& v, size_t flat) {
  std::vector<int> idx(v.axes.size(), 0);
  for (size_t k = v.axes.size(); k-- > 0;) {
    idx[k] = int(flat % size_t(v.dim));
    flat /= size_t(v.dim);
  }
  std::string s = "(";
  for (size_t k = 0; k < v.axes.size(); ++k) {
    if (k) s += ", ";
    s += v.axes[k] + "=" + std::to_string(idx[k]);
  }
  return s + ")";
}

bool scalar_close(const Scalar& a, const Scalar& b, double tol) {
  if (const auto* x = std::get_if<double>(&a))
    return std::abs(*x - std::get<double>(b)) <= tol;
  return a == b;
}

}  // namespace

InstanceReport check_equation_instances(const Equation& eq, const Model& m,
                                        InstanceBound bound) {
  InstanceReport rep;
  std::set<std::string> seen;
  for (const Instantiation& steps :
       enumerate_equation_instantiations(eq, bound)) {
    Equation inst = apply_instantiation(steps, eq);
    if (!seen.insert(instance_key(inst, eq)).second) continue;
    ++rep.checked;
    try {
      TensorValue l = evaluate(inst.lhs, m);
      TensorValue r = evaluate(inst.rhs, m);
      if (l.axes != r.axes) {
        rep.failures.push_back({steps, inst, "the sides expose different axes"});
        continue;
      }
      for (size_t i = 0; i < l.data.size(); ++i)
        if (!scalar_close(l.data[i], r.data[i], m.tol)) {
          rep.failures.push_back(
              {steps, inst,
               "at " + format_slot(l, i) + ": left " + to_string(l.data[i]) +
                   ", right " + to_string(r.data[i])});
          break;
        }
    } catch (const BtError& e) {
      rep.failures.push_back({steps, inst, e.what()});
    }
  }
  return rep;
}

namespace {

// s over n inputs is m folded left from u; stops once tables pass ~1M
// entries so large dimensions stay usable.
void fold_spiders(Model& mod, int max_legs) {
  const int d = mod.dim;
  const std::vector<Rat>& mul = mod.gens.at({"m", "^vv"});
  std::vector<Rat> prev = mod.gens.at({"u", "^"});
  mod.assign("s", "^", prev);
  for (int n = 1; n <= max_legs; ++n) {
    size_t psz = prev.size();  // d^n
    if (psz > (size_t(1) << 20) / size_t(d)) break;
    size_t inner = psz / size_t(d);  // d^(n-1)
    std::vector<Rat> cur(psz * size_t(d));
    for (int o = 0; o < d; ++o)
      for (size_t r = 0; r < inner; ++r)
        for (int xn = 0; xn < d; ++xn) {
          Rat acc = rat(0);
          for (int p = 0; p < d; ++p)
            acc = acc + mul[(size_t(o) * d + p) * d + xn] *
                            prev[size_t(p) * inner + r];
          cur[size_t(o) * psz + r * size_t(d) + size_t(xn)] = acc;
        }
    mod.assign("s", "^" + std::string(n, 'v'), cur);
    prev = std::move(cur);
  }
}

}  // namespace

Model builtin_matrix_algebra_model(int k) {
  if (k < 1 || k > 32) throw BtError("matrix algebra wants 1 <= k <= 32");
  Model mod;
  const int d = k * k;
  mod.dim = d;
  mod.semiring = Semiring::Int;

  // E(xi,xj) E(yi,yj) = [xj = yi] E(xi,yj), units flattened as i*k + j
  std::vector<Rat> mul(size_t(d) * d * d);
  for (int o = 0; o < d; ++o)
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y)
        mul[(size_t(o) * d + x) * d + y] =
            rat(x % k == y / k && o / k == x / k && o % k == y % k ? 1 : 0);
  mod.assign("m", "^vv", mul);

  std::vector<Rat> unit(d);
  for (int i = 0; i < k; ++i) unit[size_t(i) * k + i] = rat(1);
  mod.assign("u", "^", unit);

  std::vector<Rat> tp(size_t(d) * d);
  for (int o = 0; o < d; ++o)
    for (int x = 0; x < d; ++x)
      tp[size_t(o) * d + x] = rat(o / k == x % k && o % k == x / k ? 1 : 0);
  mod.assign("t", "^v", tp);

  fold_spiders(mod, 8);
  return mod;
}

Model builtin_diagonal_model(int k) {
  if (k < 1 || k > 1024) throw BtError("diagonal wants 1 <= k <= 1024");
  Model mod;
  mod.dim = k;
  mod.semiring = Semiring::Int;

  std::vector<Rat> mul(size_t(k) * k * k);
  for (int o = 0; o < k; ++o) mul[(size_t(o) * k + o) * k + o] = rat(1);
  mod.assign("m", "^vv", mul);
  mod.assign("u", "^", std::vector<Rat>(k, rat(1)));
  std::vector<Rat> tp(size_t(k) * k);
  for (int o = 0; o < k; ++o) tp[size_t(o) * k + o] = rat(1);
  mod.assign("t", "^v", tp);

  fold_spiders(mod, 8);
  return mod;
}

namespace {

// Model files are whitespace-separated words; the tensor tokenizer has no
// signed or fractional numbers, so they get their own scanner.
struct Word {
  std::string text;
  size_t off = 0, line = 1, col = 1;
};

std::vector<Word> words_of(const std::string& src) {
  std::vector<Word> out;
  size_t line = 1, col = 1, i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    Word w;
    w.off = i;
    w.line = line;
    w.col = col;
    while (i < src.size() && src[i] != '#' &&
           !std::isspace(static_cast<unsigned char>(src[i]))) {
      w.text += src[i];
      ++i;
      ++col;
    }
    out.push_back(std::move(w));
  }
  out.push_back(Word{"", src.size(), line, col});  // end marker
  return out;
}

[[noreturn]] void fail_at(const Word& w, const std::string& expected) {
  throw ParseError(w.off, w.line, w.col, expected,
                   w.text.empty() ? "end of input" : w.text);
}

// INT, -INT, INT/INT, or decimal with exponent, all held exactly. Nullopt
// for anything else, including values past 18 digits of range.
std::optional<Rat> number_of(const std::string& s) {
  size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
  auto digits = [&](long long& out) -> int {
    int count = 0;
    long long v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      if (++count > 18) return -1;
      v = v * 10 + (s[i] - '0');
      ++i;
    }
    out = v;
    return count;
  };
  long long mant = 0;
  int nint = digits(mant);
  if (nint <= 0) return std::nullopt;
  if (i < s.size() && s[i] == '/') {
    ++i;
    long long den = 0;
    if (digits(den) <= 0 || i != s.size() || den == 0) return std::nullopt;
    return rat(neg ? -mant : mant, den);
  }
  int nfrac = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    long long frac = 0;
    nfrac = digits(frac);
    if (nfrac <= 0 || nint + nfrac > 18) return std::nullopt;
    for (int f = 0; f < nfrac; ++f) mant *= 10;
    mant += frac;
  }
  long long ex = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) eneg = s[i++] == '-';
    long long ev = 0;
    if (digits(ev) <= 0) return std::nullopt;
    ex = eneg ? -ev : ev;
  }
  if (i != s.size()) return std::nullopt;
  ex -= nfrac;
  if (ex < -18 || (ex > 0 && nint + nfrac + ex > 18)) return std::nullopt;
  long long num = neg ? -mant : mant, den = 1;
  for (; ex > 0; --ex) num *= 10;
  for (; ex < 0; ++ex) den *= 10;
  return rat(num, den);
}

bool model_keyword(const std::string& t) {
  return t == "dim" || t == "semiring" || t == "tol" || t == "gen" ||
         t == "builtin";
}

}  // namespace

Model parse_model(const std::string& src) {
  std::vector<Word> ws = words_of(src);
  Model mod;
  bool dim_set = false;
  bool frozen = false;  // a gen or builtin line pins dim and semiring
  size_t i = 0;
  while (i + 1 < ws.size()) {
    const Word& w = ws[i];
    if (w.text == "dim") {
      if (frozen) fail_at(w, "dim before any gen or builtin");
      ++i;
      std::optional<Rat> n = number_of(ws[i].text);
      if (!n || n->den != 1 || n->num < 1 || n->num > 4096)
        fail_at(ws[i], "a dimension between 1 and 4096");
      mod.dim = int(n->num);
      dim_set = true;
      ++i;
    } else if (w.text == "semiring") {
      if (frozen) fail_at(w, "semiring before any gen or builtin");
      ++i;
      const std::string& t = ws[i].text;
      if (t == "int")
        mod.semiring = Semiring::Int;
      else if (t == "rat")
        mod.semiring = Semiring::Rat;
      else if (t == "float")
        mod.semiring = Semiring::Float;
      else
        fail_at(ws[i], "int, rat or float");
      ++i;
    } else if (w.text == "tol") {
      ++i;
      std::optional<Rat> n = number_of(ws[i].text);
      if (!n || n->num < 0) fail_at(ws[i], "a non-negative tolerance");
      mod.tol = double(n->num) / double(n->den);
      ++i;
    } else if (w.text == "builtin") {
      if (frozen) fail_at(w, "one builtin at most, before any gen");
      ++i;
      const std::string& name = ws[i].text;
      if (name != "matrix_algebra" && name != "diagonal")
        fail_at(ws[i], "matrix_algebra or diagonal");
      ++i;
      const std::string& kt = ws[i].text;
      std::optional<Rat> kv;
      if (kt.rfind("k=", 0) == 0) kv = number_of(kt.substr(2));
      if (!kv || kv->den != 1 || kv->num < 1 || kv->num > 32)
        fail_at(ws[i], "k=N with 1 <= N <= 32");
      Model b = name == "matrix_algebra"
                    ? builtin_matrix_algebra_model(int(kv->num))
                    : builtin_diagonal_model(int(kv->num));
      if (dim_set && mod.dim != b.dim)
        fail_at(w, "a builtin agreeing with dim " + std::to_string(mod.dim));
      mod.dim = b.dim;
      mod.gens = std::move(b.gens);
      dim_set = true;
      frozen = true;
      ++i;
    } else if (w.text == "gen") {
      if (!dim_set) fail_at(w, "dim before the first gen");
      frozen = true;
      ++i;
      const Word& nm = ws[i];
      if (nm.text.empty() ||
          !std::isalpha(static_cast<unsigned char>(nm.text[0])))
        fail_at(nm, "a generator name");
      ++i;
      const Word& wd = ws[i];
      bool okword = !wd.text.empty();
      for (char c : wd.text) okword = okword && (c == '^' || c == 'v');
      if (!okword) fail_at(wd, "an arity word over ^ and v");
      ++i;
      size_t want = 1;
      for (size_t n = 0; n < wd.text.size(); ++n) want *= size_t(mod.dim);
      std::vector<Rat> data;
      data.reserve(want);
      while (data.size() < want) {
        const Word& e = ws[i];
        std::optional<Rat> n = number_of(e.text);
        if (!n) {
          if (e.text.empty() || model_keyword(e.text))
            throw ArityMismatch(nm.text + " " + wd.text + ": expected " +
                                std::to_string(want) + " entries, got " +
                                std::to_string(data.size()));
          fail_at(e, "a number");
        }
        if (mod.semiring == Semiring::Int && n->den != 1)
          fail_at(e, "an integer entry");
        data.push_back(*n);
        ++i;
      }
      if (number_of(ws[i].text))
        throw ArityMismatch(nm.text + " " + wd.text + ": more than " +
                            std::to_string(want) + " entries");
      mod.assign(nm.text, wd.text, std::move(data));
    } else {
      fail_at(w, "dim, semiring, tol, gen or builtin");
    }
  }
  return mod;
}

}  // namespace bt

// Copyright 2026 The heapsql Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <numeric>

#include <fmt/format.h>

#include "heapsql/engine.h"
#include "heapsql/query_text.h"
#include "heapsql/status.h"

namespace heapsql {

namespace {

constexpr size_t kChunk = 2048;

// A heap column bound for row access.
struct BoundColumn {
  PhysType type = PhysType::kI32;
  const std::byte* data = nullptr;
  const char* pool = nullptr;
};

template <typename T>
inline T Load(const BoundColumn& c, uint32_t rid) {
  T v;
  std::memcpy(&v, c.data + static_cast<size_t>(rid) * sizeof(T), sizeof(T));
  return v;
}

inline int64_t GetI(const BoundColumn& c, uint32_t rid) {
  if (c.type == PhysType::kI64) return Load<int64_t>(c, rid);
  if (c.type == PhysType::kF32) return static_cast<int64_t>(Load<float>(c, rid));
  if (c.type == PhysType::kF64) return static_cast<int64_t>(Load<double>(c, rid));
  return Load<int32_t>(c, rid);
}

inline double GetF(const BoundColumn& c, uint32_t rid) {
  switch (c.type) {
    case PhysType::kF32: return Load<float>(c, rid);
    case PhysType::kF64: return Load<double>(c, rid);
    case PhysType::kI64: return static_cast<double>(Load<int64_t>(c, rid));
    default: return Load<int32_t>(c, rid);
  }
}

inline std::string_view GetS(const BoundColumn& c, uint32_t rid) {
  return std::string_view(c.pool + Load<uint32_t>(c, rid));
}

inline int64_t WrapAdd(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}
inline int64_t WrapSub(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b));
}
inline int64_t WrapMul(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b));
}

uint32_t KeyHash(const BoundColumn& c, uint32_t rid) {
  switch (c.type) {
    case PhysType::kI32:
    case PhysType::kD32: return HashKey(Load<int32_t>(c, rid));
    case PhysType::kI64: {
      const int64_t v = Load<int64_t>(c, rid);
      if (v >= INT32_MIN && v <= INT32_MAX) return HashKey(static_cast<int32_t>(v));
      return HashKey(v);
    }
    case PhysType::kF32:
    case PhysType::kF64: return HashKey(GetF(c, rid));
    case PhysType::kStr: return HashBytes(GetS(c, rid));
  }
  return 0;
}

bool KeyEqual(const BoundColumn& a, uint32_t ra, const BoundColumn& b, uint32_t rb) {
  if (a.type == PhysType::kStr) return GetS(a, ra) == GetS(b, rb);
  if (IsFloating(a.type)) return GetF(a, ra) == GetF(b, rb);
  return GetI(a, ra) == GetI(b, rb);
}

bool CmpHolds(CmpOp op, int c) {
  switch (op) {
    case CmpOp::kLt: return c < 0;
    case CmpOp::kLe: return c <= 0;
    case CmpOp::kGt: return c > 0;
    case CmpOp::kGe: return c >= 0;
    case CmpOp::kEq: return c == 0;
    case CmpOp::kNe: return c != 0;
  }
  return false;
}

template <typename T>
int Cmp3(T a, T b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

bool RangeTest(const RangeBinding& r, const BoundColumn& c, uint32_t rid) {
  if (r.empty) return false;
  switch (c.type) {
    case PhysType::kStr: {
      const std::string_view s = GetS(c, rid);
      if (r.slo) {
        const int k = s.compare(*r.slo);
        if (k < 0 || (k == 0 && !r.slo_incl)) return false;
      }
      if (r.shi) {
        const int k = s.compare(*r.shi);
        if (k > 0 || (k == 0 && !r.shi_incl)) return false;
      }
      for (const auto& x : r.sne) {
        if (s == x) return false;
      }
      return true;
    }
    case PhysType::kF32: {
      const float v = Load<float>(c, rid);
      if (!(v >= static_cast<float>(r.flo) && v <= static_cast<float>(r.fhi))) return false;
      for (double x : r.fne) {
        if (v == static_cast<float>(x)) return false;
      }
      return true;
    }
    case PhysType::kF64: {
      const double v = Load<double>(c, rid);
      if (!(v >= r.flo && v <= r.fhi)) return false;
      for (double x : r.fne) {
        if (v == x) return false;
      }
      return true;
    }
    default: {
      const int64_t v = GetI(c, rid);
      if (v < r.ilo || v > r.ihi) return false;
      for (int64_t x : r.ine) {
        if (v == x) return false;
      }
      return true;
    }
  }
}

// Vectorized range filter over a selection vector; returns survivors.
template <typename T, typename B>
size_t FilterFixed(const BoundColumn& c, B lo, B hi, uint32_t* sel, size_t n) {
  const T* data = reinterpret_cast<const T*>(c.data);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    const uint32_t rid = sel[i];
    const T v = data[rid];
    sel[k] = rid;
    k += (v >= lo) & (v <= hi);
  }
  return k;
}

size_t FilterRange(const RangeBinding& r, const BoundColumn& c, uint32_t* sel, size_t n) {
  if (r.empty) return 0;
  size_t k = n;
  switch (c.type) {
    case PhysType::kI32:
    case PhysType::kD32: {
      if (r.ilo > INT32_MAX || r.ihi < INT32_MIN) return 0;
      const auto lo = static_cast<int32_t>(std::max<int64_t>(r.ilo, INT32_MIN));
      const auto hi = static_cast<int32_t>(std::min<int64_t>(r.ihi, INT32_MAX));
      k = FilterFixed<int32_t>(c, lo, hi, sel, n);
      break;
    }
    case PhysType::kI64: k = FilterFixed<int64_t>(c, r.ilo, r.ihi, sel, n); break;
    case PhysType::kF32:
      k = FilterFixed<float>(c, static_cast<float>(r.flo), static_cast<float>(r.fhi), sel, n);
      break;
    case PhysType::kF64: k = FilterFixed<double>(c, r.flo, r.fhi, sel, n); break;
    case PhysType::kStr: {
      k = 0;
      for (size_t i = 0; i < n; ++i) {
        sel[k] = sel[i];
        k += RangeTest(r, c, sel[i]);
      }
      return k;
    }
  }
  if (r.ine.empty() && r.fne.empty()) return k;
  size_t m = 0;
  for (size_t i = 0; i < k; ++i) {
    sel[m] = sel[i];
    m += RangeTest(r, c, sel[i]);
  }
  return m;
}

// Expression evaluation over a tuple of record ids (one per source) and,
// after aggregation, the finalized aggregate values.
struct AggValue {
  int64_t i = 0;
  double f = 0;
};

struct EvalRow {
  const uint32_t* tuple = nullptr;
  const AggValue* aggs = nullptr;
};

class Node {
 public:
  explicit Node(PhysType t) : type(t) {}
  virtual ~Node() = default;
  virtual int64_t I(const EvalRow& r) const = 0;
  virtual double F(const EvalRow& r) const = 0;
  virtual std::string_view S(const EvalRow&) const { return {}; }
  PhysType type;
};

class ColumnNode final : public Node {
 public:
  ColumnNode(int source, BoundColumn col) : Node(col.type), source_(source), col_(col) {}
  int64_t I(const EvalRow& r) const override { return GetI(col_, r.tuple[source_]); }
  double F(const EvalRow& r) const override { return GetF(col_, r.tuple[source_]); }
  std::string_view S(const EvalRow& r) const override { return GetS(col_, r.tuple[source_]); }

 private:
  int source_;
  BoundColumn col_;
};

class LiteralNode final : public Node {
 public:
  explicit LiteralNode(const Literal& v) : Node(PhysType::kI64) {
    switch (v.index()) {
      case 0:
        type = PhysType::kI64;
        i_ = std::get<int64_t>(v);
        f_ = static_cast<double>(i_);
        break;
      case 1:
        type = PhysType::kF64;
        f_ = std::get<double>(v);
        i_ = static_cast<int64_t>(f_);
        break;
      case 2:
        type = PhysType::kD32;
        i_ = std::get<Date>(v).days;
        f_ = static_cast<double>(i_);
        break;
      default:
        type = PhysType::kStr;
        s_ = std::get<std::string>(v);
    }
  }
  int64_t I(const EvalRow&) const override { return i_; }
  double F(const EvalRow&) const override { return f_; }
  std::string_view S(const EvalRow&) const override { return s_; }

 private:
  int64_t i_ = 0;
  double f_ = 0;
  std::string s_;
};

class ArithNode final : public Node {
 public:
  ArithNode(ArithOp op, std::unique_ptr<Node> l, std::unique_ptr<Node> r)
      : Node(op == ArithOp::kDiv || IsFloating(l->type) || IsFloating(r->type) ? PhysType::kF64
                                                                               : PhysType::kI64),
        op_(op),
        l_(std::move(l)),
        r_(std::move(r)) {}

  int64_t I(const EvalRow& row) const override {
    if (type == PhysType::kF64) return static_cast<int64_t>(F(row));
    const int64_t a = l_->I(row), b = r_->I(row);
    switch (op_) {
      case ArithOp::kAdd: return WrapAdd(a, b);
      case ArithOp::kSub: return WrapSub(a, b);
      case ArithOp::kMul: return WrapMul(a, b);
      case ArithOp::kDiv: break;
    }
    return 0;
  }

  double F(const EvalRow& row) const override {
    if (type == PhysType::kI64) return static_cast<double>(I(row));
    const double a = l_->F(row), b = r_->F(row);
    switch (op_) {
      case ArithOp::kAdd: return a + b;
      case ArithOp::kSub: return a - b;
      case ArithOp::kMul: return a * b;
      case ArithOp::kDiv: return a / b;
    }
    return 0;
  }

 private:
  ArithOp op_;
  std::unique_ptr<Node> l_;
  std::unique_ptr<Node> r_;
};

class AggRefNode final : public Node {
 public:
  AggRefNode(PhysType t, size_t index) : Node(t), index_(index) {}
  int64_t I(const EvalRow& r) const override { return r.aggs[index_].i; }
  double F(const EvalRow& r) const override {
    return IsFloating(type) ? r.aggs[index_].f : static_cast<double>(r.aggs[index_].i);
  }

 private:
  size_t index_;
};

struct AggState {
  int64_t isum = 0;
  double fsum = 0;
  int64_t count = 0;
  int64_t imin = 0, imax = 0;
  double fmin = 0, fmax = 0;
  bool any = false;
};

bool IntDomain(PhysType t) { return !IsFloating(t); }

void AppendValue(ColumnBuffer& out, const Node& n, const EvalRow& row, PhysType type) {
  switch (type) {
    case PhysType::kI32: out.AppendI32(static_cast<int32_t>(n.I(row))); break;
    case PhysType::kD32: out.AppendDate(Date{static_cast<int32_t>(n.I(row))}); break;
    case PhysType::kI64: out.AppendI64(n.I(row)); break;
    case PhysType::kF32: out.AppendF32(static_cast<float>(n.F(row))); break;
    case PhysType::kF64: out.AppendF64(n.F(row)); break;
    case PhysType::kStr: out.AppendString(n.S(row)); break;
  }
}

// Tuples of record ids in a heap region that grows in place; nothing else
// may be allocated while it is being filled.
class TupleBuffer {
 public:
  TupleBuffer(ColumnarHeap& heap, int width) : heap_(heap), width_(width) {}

  void Push(const uint32_t* t) {
    if (count_ == cap_) Grow();
    uint32_t* dst = heap_.At<uint32_t>(base_) + count_ * width_;
    for (int i = 0; i < width_; ++i) dst[i] = t[i];
    ++count_;
  }
  size_t size() const { return count_; }
  const uint32_t* at(size_t i) const { return heap_.At<uint32_t>(base_) + i * width_; }

 private:
  void Grow() {
    const size_t add = std::max<size_t>(cap_, 4096);
    const size_t row_bytes = width_ * sizeof(uint32_t);
    const size_t off = heap_.Alloc(add * row_bytes, 4);
    if (cap_ == 0) {
      base_ = off;
    } else if (off != base_ + cap_ * row_bytes) {
      // Something else was allocated in between: move to a fresh region.
      const size_t moved = heap_.Alloc((cap_ + add) * row_bytes, 4);
      std::memcpy(heap_.data() + moved, heap_.data() + base_, count_ * row_bytes);
      base_ = moved;
    }
    cap_ += add;
  }

  ColumnarHeap& heap_;
  int width_;
  size_t base_ = 0;
  size_t cap_ = 0;
  size_t count_ = 0;
};

// Values of an IS-IN subquery, loaded into the heap and hashed by rid.
struct InSet {
  BoundColumn values;
  std::unique_ptr<HashTable> table;

  bool Contains(const BoundColumn& probe, uint32_t rid) const {
    auto cur = table->Probe(KeyHash(probe, rid));
    uint32_t cand;
    while (cur.Next(&cand)) {
      if (KeyEqual(probe, rid, values, cand)) return true;
    }
    return false;
  }
};

BoundColumn Bind(const ColumnarHeap& heap, const ColumnDescriptor& d) {
  BoundColumn c;
  c.type = d.type;
  c.data = heap.data() + d.base_offset;
  c.pool = reinterpret_cast<const char*>(heap.data() + d.pool_base);
  return c;
}

class Executor {
 public:
  Executor(const PhysicalPlan& plan, ColumnarHeap& heap, const Catalog& catalog, ExecStats* stats)
      : plan_(plan), heap_(heap), catalog_(catalog), stats_(stats) {}

  ResultSet Run() {
    BindSources();
    BuildInSets();
    ResultSet rs = plan_.aggregated() ? (plan_.group_keys.empty() ? RunScalarAgg() : RunGrouped())
                                      : RunProject();
    if (stats_) {
      stats_->template_id = plan_.template_id;
      stats_->heap_peak = std::max(stats_->heap_peak, heap_.high_water());
    }
    if (!plan_.spec.order.empty() || plan_.spec.limit) {
      rs = SortLimit(std::move(rs), plan_.spec.order, plan_.spec.limit);
    }
    return rs;
  }

 private:
  void BindSources() {
    for (size_t s = 0; s < plan_.source_names.size(); ++s) {
      const TableDescriptor* t = nullptr;
      if (s == 0 && plan_.derived_subplan >= 0) {
        ResultSet sub = Execute(*plan_.subplans[plan_.derived_subplan], heap_, catalog_, nullptr);
        derived_ = LoadResultSet(heap_, temps_, plan_.source_names[0], sub);
        t = &derived_;
      } else {
        t = &catalog_.Get(plan_.source_names[s]);
      }
      rows_.push_back(t->row_count);
      std::vector<BoundColumn> cols;
      for (const auto& d : t->columns) cols.push_back(Bind(heap_, d));
      cols_.push_back(std::move(cols));
    }
  }

  void BuildInSets() {
    in_sets_.resize(plan_.subplans.size());
    for (const auto& b : plan_.predicates) {
      if (b.kind != PredicateBinding::Kind::kIsIn) continue;
      ResultSet sub = Execute(*plan_.subplans[b.in.subplan], heap_, catalog_, nullptr);
      const std::string name = fmt::format("__in{}", b.in.subplan);
      TableDescriptor t = LoadResultSet(heap_, temps_, name, sub);
      auto set = std::make_unique<InSet>();
      set->values = Bind(heap_, t.columns[0]);
      set->table = std::make_unique<HashTable>(heap_, t.row_count);
      for (uint32_t rid = 0; rid < t.row_count; ++rid) {
        set->table->Insert(KeyHash(set->values, rid), rid);
      }
      in_sets_[b.in.subplan] = std::move(set);
    }
  }

  const BoundColumn& Col(const ColumnSlot& s) const { return cols_[s.source][s.column]; }

  bool RowTest(const PredicateBinding& b, const uint32_t* tuple) const {
    switch (b.kind) {
      case PredicateBinding::Kind::kRange:
        return RangeTest(b.range, Col(b.range.column), tuple[b.range.column.source]);
      case PredicateBinding::Kind::kOr:
        for (const auto& t : b.any.terms) {
          if (RangeTest(t, Col(t.column), tuple[t.column.source])) return true;
        }
        return false;
      case PredicateBinding::Kind::kColumnCmp: {
        const BoundColumn& l = Col(b.cmp.left);
        const BoundColumn& r = Col(b.cmp.right);
        const uint32_t lr = tuple[b.cmp.left.source], rr = tuple[b.cmp.right.source];
        int c;
        if (l.type == PhysType::kStr) {
          c = GetS(l, lr).compare(GetS(r, rr));
        } else if (IsFloating(l.type) || IsFloating(r.type)) {
          c = Cmp3(GetF(l, lr), GetF(r, rr));
        } else {
          c = Cmp3(GetI(l, lr), GetI(r, rr));
        }
        return CmpHolds(b.cmp.op, c);
      }
      case PredicateBinding::Kind::kIsIn:
        return in_sets_[b.in.subplan]->Contains(Col(b.in.column), tuple[b.in.column.source]);
    }
    return false;
  }

  // Scans one source, applying its local predicates chunk by chunk.
  template <typename Emit>
  void ScanSource(int source, Emit&& emit) {
    ScanChunks(source, [&](const uint32_t* sel, size_t n) {
      for (size_t i = 0; i < n; ++i) emit(sel[i]);
    });
  }

  template <typename EmitChunk>
  void ScanChunks(int source, EmitChunk&& emit_chunk) {
    uint32_t sel[kChunk];
    uint32_t tuple[2] = {0, 0};
    const uint32_t rows = rows_[source];
    if (stats_) stats_->rows_scanned += rows;
    for (uint32_t base = 0; base < rows; base += kChunk) {
      size_t n = std::min<size_t>(kChunk, rows - base);
      for (size_t i = 0; i < n; ++i) sel[i] = base + static_cast<uint32_t>(i);
      for (const auto& b : plan_.predicates) {
        if (b.source != source || n == 0) continue;
        if (b.kind == PredicateBinding::Kind::kRange) {
          n = FilterRange(b.range, Col(b.range.column), sel, n);
        } else {
          size_t k = 0;
          for (size_t i = 0; i < n; ++i) {
            tuple[source] = sel[i];
            sel[k] = sel[i];
            k += RowTest(b, tuple);
          }
          n = k;
        }
      }
      if (n) emit_chunk(static_cast<const uint32_t*>(sel), n);
    }
  }

  // Streams every qualifying tuple (one rid per source) to `consume`.
  template <typename Consume>
  void ProduceTuples(Consume&& consume) {
    if (plan_.join_keys.empty()) {
      uint32_t t[1];
      ScanSource(0, [&](uint32_t rid) {
        t[0] = rid;
        consume(static_cast<const uint32_t*>(t));
      });
      return;
    }
    TupleBuffer side0(heap_, 1);
    ScanSource(0, [&](uint32_t rid) { side0.Push(&rid); });
    TupleBuffer side1(heap_, 1);
    ScanSource(1, [&](uint32_t rid) { side1.Push(&rid); });
    const int build = side1.size() <= side0.size() ? 1 : 0;
    const int probe = 1 - build;
    const TupleBuffer& bside = build ? side1 : side0;
    const TupleBuffer& pside = build ? side0 : side1;
    const BoundColumn& bkey = Col(plan_.join_keys[build]);
    const BoundColumn& pkey = Col(plan_.join_keys[probe]);
    HashTable ht(heap_, bside.size());
    for (size_t i = 0; i < bside.size(); ++i) {
      const uint32_t rid = *bside.at(i);
      ht.Insert(KeyHash(bkey, rid), rid);
    }
    if (stats_) {
      stats_->build_side = build;
      stats_->hash_capacity = ht.capacity();
      stats_->hash_writes = ht.stats();
    }
    std::vector<const PredicateBinding*> post;
    for (const auto& b : plan_.predicates) {
      if (b.source == -1) post.push_back(&b);
    }
    uint32_t t[2];
    for (size_t i = 0; i < pside.size(); ++i) {
      const uint32_t prid = *pside.at(i);
      auto cur = ht.Probe(KeyHash(pkey, prid));
      uint32_t brid;
      while (cur.Next(&brid)) {
        if (!KeyEqual(pkey, prid, bkey, brid)) continue;
        t[probe] = prid;
        t[build] = brid;
        bool ok = true;
        for (const auto* b : post) {
          if (!RowTest(*b, t)) {
            ok = false;
            break;
          }
        }
        if (ok) consume(static_cast<const uint32_t*>(t));
      }
    }
  }

  std::unique_ptr<Node> Build(const Expr& e, bool with_aggs) const {
    switch (e->kind) {
      case ExprKind::kColumn: {
        // Columns were resolved at compile time; find the slot by name.
        for (size_t s = 0; s < cols_.size(); ++s) {
          const TableDescriptor* t = nullptr;
          if (s == 0 && plan_.derived_subplan >= 0) {
            t = &derived_;
          } else {
            t = &catalog_.Get(plan_.source_names[s]);
          }
          if (!e->column.table.empty() && e->column.table != plan_.source_names[s]) continue;
          for (size_t c = 0; c < t->columns.size(); ++c) {
            if (t->columns[c].name == e->column.name) {
              return std::make_unique<ColumnNode>(static_cast<int>(s), cols_[s][c]);
            }
          }
        }
        throw Error(ErrorCode::kUnknownColumn, "unbound column " + e->column.ToString());
      }
      case ExprKind::kLiteral: return std::make_unique<LiteralNode>(e->literal);
      case ExprKind::kArith:
        return std::make_unique<ArithNode>(e->arith_op, Build(e->left, with_aggs),
                                           Build(e->right, with_aggs));
      case ExprKind::kAgg: {
        const std::string key = ToString(e);
        for (size_t i = 0; i < agg_keys_.size(); ++i) {
          if (agg_keys_[i] == key) {
            return std::make_unique<AggRefNode>(plan_.aggregates[i].out_type, i);
          }
        }
        throw Error(ErrorCode::kInvalidArgument, "unbound aggregate " + ToString(e));
      }
    }
    return nullptr;
  }

  void PrepareAggs() {
    for (const auto& a : plan_.aggregates) {
      agg_keys_.push_back(ToString(MakeAgg(a.fn, a.arg)));
      agg_args_.push_back(a.arg ? Build(a.arg, false) : nullptr);
    }
    states_.assign(plan_.aggregates.size(), AggState{});
    values_.assign(plan_.aggregates.size(), AggValue{});
  }

  void ResetStates() { std::fill(states_.begin(), states_.end(), AggState{}); }

  void Accumulate(const uint32_t* tuple) { Accumulate(tuple, states_.data()); }

  void Accumulate(const uint32_t* tuple, AggState* states) {
    const EvalRow row{tuple, nullptr};
    for (size_t i = 0; i < states_.size(); ++i) {
      const AggSlot& a = plan_.aggregates[i];
      AggState& s = states[i];
      ++s.count;
      if (a.fn == AggFn::kCount) continue;
      const Node& arg = *agg_args_[i];
      if (IntDomain(a.arg_type)) {
        const int64_t v = arg.I(row);
        if (a.fn == AggFn::kSum || a.fn == AggFn::kAvg) {
          s.isum = WrapAdd(s.isum, v);
        } else if (!s.any) {
          s.imin = s.imax = v;
        } else {
          s.imin = std::min(s.imin, v);
          s.imax = std::max(s.imax, v);
        }
      } else {
        const double v = arg.F(row);
        if (a.fn == AggFn::kSum || a.fn == AggFn::kAvg) {
          s.fsum += v;
        } else if (!s.any) {
          s.fmin = s.fmax = v;
        } else {
          s.fmin = std::min(s.fmin, v);
          s.fmax = std::max(s.fmax, v);
        }
      }
      s.any = true;
    }
  }

  void Finalize() { Finalize(states_.data()); }

  void Finalize(const AggState* states) {
    for (size_t i = 0; i < states_.size(); ++i) {
      const AggSlot& a = plan_.aggregates[i];
      const AggState& s = states[i];
      AggValue& v = values_[i];
      const bool int_arg = IntDomain(a.arg_type);
      switch (a.fn) {
        case AggFn::kCount:
          v.i = s.count;
          v.f = static_cast<double>(s.count);
          break;
        case AggFn::kSum:
          v.i = int_arg ? s.isum : static_cast<int64_t>(s.fsum);
          v.f = int_arg ? static_cast<double>(s.isum) : s.fsum;
          break;
        case AggFn::kAvg:
          v.f = (int_arg ? static_cast<double>(s.isum) : s.fsum) / static_cast<double>(s.count);
          v.i = 0;
          break;
        case AggFn::kMin:
        case AggFn::kMax: {
          const bool is_min = a.fn == AggFn::kMin;
          if (int_arg) {
            if (s.any) {
              v.i = is_min ? s.imin : s.imax;
            } else {
              v.i = a.out_type == PhysType::kI64 ? std::numeric_limits<int64_t>::min()
                                                 : std::numeric_limits<int32_t>::min();
            }
            v.f = static_cast<double>(v.i);
          } else {
            v.f = s.any ? (is_min ? s.fmin : s.fmax) : std::nan("");
            v.i = 0;
          }
          break;
        }
      }
    }
  }

  ResultSet MakeOutput() const {
    ResultSet rs;
    for (const auto& c : plan_.output) rs.columns.emplace_back(c.name, c.type);
    return rs;
  }

  ResultSet RunProject() {
    ResultSet rs = MakeOutput();
    std::vector<std::unique_ptr<Node>> nodes;
    for (const auto& s : plan_.spec.select) nodes.push_back(Build(s.expr, false));
    uint64_t tuples = 0;
    ProduceTuples([&](const uint32_t* t) {
      const EvalRow row{t, nullptr};
      for (size_t i = 0; i < nodes.size(); ++i) {
        AppendValue(rs.columns[i], *nodes[i], row, plan_.output[i].type);
      }
      ++tuples;
    });
    if (stats_) stats_->tuples = tuples;
    return rs;
  }

  ResultSet RunScalarAgg() {
    PrepareAggs();
    std::vector<std::unique_ptr<Node>> nodes;
    for (const auto& s : plan_.spec.select) nodes.push_back(Build(s.expr, true));
    uint64_t tuples = 0;
    ProduceTuples([&](const uint32_t* t) {
      Accumulate(t);
      ++tuples;
    });
    Finalize();
    ResultSet rs = MakeOutput();
    const EvalRow row{nullptr, values_.data()};
    for (size_t i = 0; i < nodes.size(); ++i) {
      AppendValue(rs.columns[i], *nodes[i], row, plan_.output[i].type);
    }
    if (stats_) {
      stats_->tuples = tuples;
      stats_->groups = 1;
    }
    return rs;
  }

  ResultSet RunGrouped() {
    PrepareAggs();
    std::vector<std::unique_ptr<Node>> nodes;
    for (const auto& s : plan_.spec.select) nodes.push_back(Build(s.expr, true));
    std::vector<std::pair<const BoundColumn*, int>> keys;
    for (const auto& g : plan_.group_keys) keys.emplace_back(&Col(g), g.source);
    auto tuple_hash = [&](const uint32_t* t) {
      uint32_t h = 0;
      for (const auto& [col, src] : keys) h = HashCombine(h, KeyHash(*col, t[src]));
      return h;
    };
    auto same_key = [&](const uint32_t* ta, const uint32_t* tb) {
      for (const auto& [col, src] : keys) {
        if (!KeyEqual(*col, ta[src], *col, tb[src])) return false;
      }
      return true;
    };
    ResultSet rs = MakeOutput();
    auto emit = [&](const uint32_t* rep) {
      const EvalRow row{rep, values_.data()};
      for (size_t i = 0; i < nodes.size(); ++i) {
        AppendValue(rs.columns[i], *nodes[i], row, plan_.output[i].type);
      }
    };
    const int width = static_cast<int>(cols_.size());
    const size_t na = states_.size();
    uint64_t tuple_count = 0, groups = 0;

    if (plan_.join_keys.empty()) {
      // One source: groups cannot outnumber its rows, so aggregate while
      // scanning. The table maps a key hash to the group's ordinal.
      // The table starts small and is rebuilt at 4x whenever it fills, so
      // few groups touch few directory pages.
      size_t limit = std::min<size_t>(rows_[0], 1024);
      auto ht = std::make_unique<HashTable>(heap_, limit);
      TupleBuffer reps(heap_, width);
      std::vector<AggState> gstates;
      std::vector<uint32_t> ghash;
      // A single 32-bit key compares against a copy of each group's key.
      const bool key32 = keys.size() == 1 && (keys[0].first->type == PhysType::kI32 ||
                                               keys[0].first->type == PhysType::kD32);
      std::vector<int32_t> gkey;
      auto step = [&](const uint32_t* t, uint32_t h, int32_t k32) {
        ++tuple_count;
        auto cur = ht->Probe(h);
        uint32_t g;
        bool found = false;
        while (cur.Next(&g)) {
          if (key32 ? gkey[g] == k32 : same_key(reps.at(g), t)) {
            found = true;
            break;
          }
        }
        if (!found) {
          g = static_cast<uint32_t>(reps.size());
          if (g == limit) {
            limit = std::min<size_t>(rows_[0], limit * 4);
            ht = std::make_unique<HashTable>(heap_, limit);
            for (uint32_t i = 0; i < g; ++i) ht->Insert(ghash[i], i);
          }
          reps.Push(t);
          ht->Insert(h, g);
          ghash.push_back(h);
          if (key32) gkey.push_back(k32);
          gstates.resize(gstates.size() + na);
        }
        Accumulate(t, gstates.data() + static_cast<size_t>(g) * na);
      };
      if (key32) {
        // Hash a whole chunk first and prefetch its buckets.
        uint32_t hs[kChunk];
        int32_t ks[kChunk];
        ScanChunks(0, [&](const uint32_t* sel, size_t n) {
          for (size_t i = 0; i < n; ++i) {
            ks[i] = Load<int32_t>(*keys[0].first, sel[i]);
            hs[i] = HashKey(ks[i]);
            ht->Prefetch(hs[i]);
          }
          for (size_t i = 0; i < n; ++i) step(sel + i, hs[i], ks[i]);
        });
      } else {
        ProduceTuples([&](const uint32_t* t) { step(t, tuple_hash(t), 0); });
      }
      groups = reps.size();
      for (size_t g = 0; g < groups; ++g) {
        Finalize(gstates.data() + g * na);
        emit(reps.at(g));
      }
      RecordGroupStats(*ht, tuple_count, groups);
      return rs;
    }

    // Join output size is unknown up front: materialize the tuples, then
    // hash them by rid and discover groups through the validity bitmap.
    TupleBuffer tuples(heap_, width);
    ProduceTuples([&](const uint32_t* t) { tuples.Push(t); });
    HashTable ht(heap_, tuples.size());
    for (size_t i = 0; i < tuples.size(); ++i) {
      ht.Insert(tuple_hash(tuples.at(i)), static_cast<uint32_t>(i));
    }
    ht.ScanGroups(
        [&](uint32_t a, uint32_t b) { return same_key(tuples.at(a), tuples.at(b)); },
        [&](std::span<const uint32_t> members) {
          ResetStates();
          for (uint32_t m : members) Accumulate(tuples.at(m));
          Finalize();
          emit(tuples.at(members.front()));
          ++groups;
        });
    RecordGroupStats(ht, tuples.size(), groups);
    return rs;
  }

  void RecordGroupStats(const HashTable& ht, uint64_t tuples, uint64_t groups) {
    if (!stats_) return;
    stats_->tuples = tuples;
    stats_->groups = groups;
    stats_->hash_capacity = ht.capacity();
    stats_->hash_writes = ht.stats();
    stats_->heap_peak = std::max(stats_->heap_peak, heap_.high_water());
  }

  const PhysicalPlan& plan_;
  ColumnarHeap& heap_;
  const Catalog& catalog_;
  ExecStats* stats_;
  Catalog temps_;
  TableDescriptor derived_;
  std::vector<uint32_t> rows_;
  std::vector<std::vector<BoundColumn>> cols_;
  std::vector<std::unique_ptr<InSet>> in_sets_;
  std::vector<std::string> agg_keys_;
  std::vector<std::unique_ptr<Node>> agg_args_;
  std::vector<AggState> states_;
  std::vector<AggValue> values_;
};

int CompareCells(const ColumnBuffer& c, size_t a, size_t b) {
  switch (c.type()) {
    case PhysType::kI32: return Cmp3(c.I32(a), c.I32(b));
    case PhysType::kD32: return Cmp3(c.D32(a).days, c.D32(b).days);
    case PhysType::kI64: return Cmp3(c.I64(a), c.I64(b));
    case PhysType::kStr: {
      const int k = c.Str(a).compare(c.Str(b));
      return k < 0 ? -1 : (k > 0 ? 1 : 0);
    }
    case PhysType::kF32:
    case PhysType::kF64: {
      const double x = c.type() == PhysType::kF32 ? c.F32(a) : c.F64(a);
      const double y = c.type() == PhysType::kF32 ? c.F32(b) : c.F64(b);
      const bool nx = std::isnan(x), ny = std::isnan(y);
      if (nx || ny) return nx == ny ? 0 : (nx ? 1 : -1);
      return Cmp3(x, y);
    }
  }
  return 0;
}

}  // namespace

ResultSet Execute(const PhysicalPlan& plan, ColumnarHeap& heap, const Catalog& catalog,
                  ExecStats* stats) {
  HeapScope scope(heap);
  Executor ex(plan, heap, catalog, stats);
  return ex.Run();
}

ResultSet ExecuteQuery(const QuerySpec& spec, Database& db, ExecStats* stats) {
  return Execute(Compile(spec, db.catalog), db.heap, db.catalog, stats);
}

ResultSet SortLimit(ResultSet rs, const std::vector<OrderItem>& order,
                    std::optional<uint64_t> limit) {
  std::vector<std::pair<const ColumnBuffer*, bool>> keys;
  for (const auto& o : order) {
    const ColumnBuffer* c = rs.Find(o.key);
    if (!c) throw Error(ErrorCode::kUnknownColumn, "ORDER BY key '" + o.key + "' not in result");
    keys.emplace_back(c, o.descending);
  }
  std::vector<uint32_t> perm(rs.row_count());
  std::iota(perm.begin(), perm.end(), 0u);
  if (!keys.empty()) {
    std::stable_sort(perm.begin(), perm.end(), [&](uint32_t a, uint32_t b) {
      for (const auto& [col, desc] : keys) {
        const int c = CompareCells(*col, a, b);
        if (c != 0) return desc ? c > 0 : c < 0;
      }
      return false;
    });
  }
  if (limit && *limit < perm.size()) perm.resize(*limit);
  ResultSet out;
  for (const auto& c : rs.columns) {
    ColumnBuffer col(c.name(), c.type());
    col.Reserve(perm.size());
    for (uint32_t r : perm) col.AppendFrom(c, r);
    out.columns.push_back(std::move(col));
  }
  return out;
}

TableDescriptor LoadResultSet(ColumnarHeap& heap, Catalog& catalog, std::string name,
                              const ResultSet& rs) {
  return LoadTable(heap, catalog, std::move(name), rs.columns);
}

}  // namespace heapsql

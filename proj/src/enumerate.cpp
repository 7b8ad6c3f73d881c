#include "aqe/enumerate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "aqe/errors.hpp"

namespace aqe {

IndexSpace::IndexSpace(uint64_t n, int min_len, int max_len) : n_(n), min_len_(min_len), max_len_(max_len) {
    uint64_t total = 0;
    for (int len = min_len; len <= max_len; ++len) {
        start_.push_back(total);
        uint64_t block = 1;
        for (int i = 0; i < len; ++i) {
            if (n != 0 && block > UINT64_MAX / n) throw BudgetExceeded("index space exceeds 64 bits");
            block *= n;
        }
        if (total > UINT64_MAX - block) throw BudgetExceeded("index space exceeds 64 bits");
        total += block;
    }
    size_ = total;
}

IndexSpace IndexSpace::tuples(uint64_t n, int k) {
    if (k < 1) throw Error("tuple length must be positive");
    return IndexSpace(n, k, k);
}

IndexSpace IndexSpace::prefix_union(uint64_t n, int c) {
    if (c < 1) throw Error("block count must be positive");
    return IndexSpace(n, 1, c);
}

int IndexSpace::decode(uint64_t index, Element* out) const {
    int b = static_cast<int>(start_.size()) - 1;
    while (b > 0 && start_[b] > index) --b;
    const int len = min_len_ + b;
    uint64_t x = index - start_[b];
    for (int i = len - 1; i >= 0; --i) {
        out[i] = static_cast<Element>(x % n_) + 1;
        x /= n_;
    }
    return len;
}

uint64_t IndexSpace::encode(std::span<const Element> t) const {
    const int len = static_cast<int>(t.size());
    if (len < min_len_ || len > max_len_) throw ArityMismatch("tuple length outside the index space");
    uint64_t x = 0;
    for (Element e : t) {
        if (e < 1 || e > n_) throw ElementOutOfRange("tuple element outside [1,n]");
        x = x * n_ + (e - 1);
    }
    return start_[len - min_len_] + x;
}

LazyFlags::LazyFlags(uint64_t size) {
    if (size <= (uint64_t{1} << 30)) {
        words_ = static_cast<uint64_t*>(std::calloc(size / 64 + 1, sizeof(uint64_t)));
        if (!words_) throw std::bad_alloc();
    }
}

LazyFlags::~LazyFlags() { std::free(words_); }

bool LazyFlags::test_and_set(uint64_t i) {
    if (!words_) return !sparse_.insert(i).second;
    uint64_t& w = words_[i >> 6];
    const uint64_t bit = uint64_t{1} << (i & 63);
    const bool was = w & bit;
    w |= bit;
    return was;
}

bool LazyFlags::test(uint64_t i) const {
    if (!words_) return sparse_.count(i) > 0;
    return words_[i >> 6] >> (i & 63) & 1;
}

double q_for(double mu, double delta) {
    const double a = 1.0 - mu * (1.0 - mu);
    return std::min(a * a, (1.0 - delta) * (1.0 - delta) / 9.0);
}

uint64_t alpha_for(double mu, double delta) {
    const double x = std::log(q_for(mu, delta)) / std::log(1.0 - mu * (1.0 - mu));
    return static_cast<uint64_t>(std::ceil(x - 1e-9));
}

uint64_t batch_for(double mu) { return static_cast<uint64_t>(std::ceil(1.0 / (mu * mu) - 1e-9)); }

uint64_t round_bound(uint64_t alpha, uint64_t batch) { return 4 * (alpha + batch) + 2; }

PartitionedEnumerator::PartitionedEnumerator(IndexSpace space, Pred in_v1, double mu, double delta, uint64_t seed)
    : space_(space), in_v1_(std::move(in_v1)), mu_(mu), delta_(delta), q_(q_for(mu, delta)),
      alpha_(alpha_for(mu, delta)), batch_(batch_for(mu)), rng_(seed), seen_(space.size()),
      buf_(space.max_len()) {
    if (!(mu > 0 && mu < 1)) throw Error("mu must lie in (0,1)");
    if (!(delta > 0 && delta < 1)) throw Error("delta must lie in (0,1)");
}

void PartitionedEnumerator::consider(uint64_t index) {
    ++ops_;
    if (!dedup_off_ && seen_.test_and_set(index)) return;
    ++ops_;
    const int len = space_.decode(index, buf_.data());
    if (!in_v1_(std::span<const Element>(buf_.data(), len))) return;
    ++ops_;
    queue_.push_back(index);
    peak_queue_ = std::max(peak_queue_, queue_.size() - head_);
}

bool PartitionedEnumerator::next(std::vector<Element>& out) {
    if (done_) return false;
    if (space_.size() > 0) {
        for (uint64_t i = 0; i < alpha_; ++i) {
            ++ops_;
            consider(rng_.below(space_.size()));
        }
        for (uint64_t j = 0; j < batch_ && cursor_ < space_.size(); ++j) {
            ++ops_;
            consider(cursor_++);
        }
    }
    ++ops_;
    if (head_ == queue_.size()) {
        done_ = true;
        return false;
    }
    out.resize(space_.max_len());
    out.resize(space_.decode(queue_[head_++], out.data()));
    return true;
}

std::string EnumSummary::to_text() const {
    std::ostringstream o;
    o << "mode=" << mode << " seed=" << seed << " gamma=" << gamma << " eps=" << eps << " mu=" << mu
      << " delta=" << delta << " q=" << q << " alpha=" << alpha << " batch=" << batch << " c=" << c
      << " s_eff=" << s_eff << " space=" << space_size << " outputs=" << outputs << " max_delay_ops=" << max_delay
      << " p99_delay_ops=" << p99_delay << " end_delay_ops=" << end_delay << " bound_ops=" << analytic_bound
      << " peak_queue=" << peak_queue << " type_set=" << type_set_size << " exact_branch=" << exact_branch
      << " truncated=" << truncated << " preprocess_s=" << preprocess_seconds
      << " enumerate_s=" << enumerate_seconds;
    return o.str();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

void check_params(const Database& db, const QueryNF& q, const EnumOptions& opt) {
    if (!(opt.gamma > 0 && opt.gamma <= 1)) throw Error("gamma must lie in (0,1]");
    if (!(opt.eps > 0 && opt.eps <= 1)) throw Error("epsilon must lie in (0,1]");
    if (!(*q.schema == db.schema())) throw SchemaMismatch("query and database schemas differ");
    if (db.max_degree() > q.d) throw Error("database degree exceeds the query's degree bound");
}

struct CacheHolder {
    std::unique_ptr<LocalTypeCache> own;
    LocalTypeCache* cache;
    CacheHolder(const Database& db, const QueryNF& q, LocalTypeCache* shared) {
        if (shared) {
            if (&shared->db() != &db || shared->radius() != q.r || shared->registry_ptr() != q.registry)
                throw Error("shared type cache does not match the database and query");
            cache = shared;
        } else {
            own = std::make_unique<LocalTypeCache>(db, q.r, q.registry);
            cache = own.get();
        }
    }
};

// Runs a source until it stops, recording the work between outputs.
void drive(const std::function<bool(std::vector<Element>&)>& next, const std::function<uint64_t()>& ops,
           const EnumOptions& opt, const EmitFn& emit, EnumSummary& s) {
    const auto t0 = Clock::now();
    std::vector<uint64_t> delays;
    std::vector<Element> t;
    uint64_t last = ops();
    while (true) {
        if (opt.max_outputs && s.outputs == opt.max_outputs) {
            s.truncated = true;
            break;
        }
        const bool got = next(t);
        const uint64_t now = ops();
        const uint64_t delay = now - last;
        last = now;
        if (!got) {
            s.end_delay = delay;
            break;
        }
        delays.push_back(delay);
        ++s.outputs;
        if (!emit(t)) {
            s.truncated = true;
            break;
        }
    }
    s.max_delay = s.end_delay;
    for (uint64_t d : delays) s.max_delay = std::max(s.max_delay, d);
    if (!delays.empty()) {
        std::sort(delays.begin(), delays.end());
        s.p99_delay = delays[std::min(delays.size() - 1, static_cast<size_t>(0.99 * delays.size()))];
    }
    s.enumerate_seconds = seconds_since(t0);
}

void fill(EnumSummary& s, const PartitionedEnumerator& pe, const EnumOptions& opt) {
    s.mu = pe.mu();
    s.delta = pe.delta();
    s.q = pe.q();
    s.alpha = pe.alpha();
    s.batch = pe.batch();
    s.seed = opt.seed;
    s.gamma = opt.gamma;
    s.eps = opt.eps;
    s.space_size = pe.space().size();
    s.analytic_bound = round_bound(s.alpha, s.batch);
}

EnumSummary run_flat(const Database& db, const QueryNF& q, const EnumOptions& opt, const EmitFn& emit,
                     LocalTypeCache& cache, const std::vector<TypeId>& members, double delta, EnumSummary s) {
    PartitionedEnumerator pe(
        IndexSpace::tuples(db.n(), q.k),
        [&](std::span<const Element> t) { return std::binary_search(members.begin(), members.end(), cache.tuple_type(t)); },
        opt.gamma, delta, opt.seed);
    pe.disable_dedup(opt.disable_dedup);
    fill(s, pe, opt);
    s.type_set_size = members.size();
    drive([&](std::vector<Element>& t) { return pe.next(t); }, [&] { return pe.ops(); }, opt, emit, s);
    s.peak_queue = pe.peak_queue();
    return s;
}

EnumSummary run_expanding(const Database& db, const QueryNF& q, const EnumOptions& opt, const EmitFn& emit,
                          LocalTypeCache& cache, const std::vector<TypeId>& members, EnumSummary s) {
    SplitEngine eng(cache, members, q.k);
    s.c = eng.conn();
    s.s_eff = opt.s_eff_override.value_or(eng.s_eff());
    if (s.s_eff == 0) throw Error("s_eff must be positive");
    const double mu = opt.gamma / (static_cast<double>(s.c) * static_cast<double>(s.s_eff));
    PartitionedEnumerator pe(
        IndexSpace::prefix_union(db.n(), s.c), [&](std::span<const Element> a) { return eng.has_candidate(a); }, mu,
        4.0 / 5.0, opt.seed);
    pe.disable_dedup(opt.disable_dedup);
    fill(s, pe, opt);
    s.type_set_size = members.size();
    s.analytic_bound += s.s_eff + 1;
    std::vector<Element> pending, leaders;
    size_t head = 0;
    const int k = q.k;
    size_t peak = 0;
    auto next = [&](std::vector<Element>& out) {
        if (head == pending.size()) {
            pending.clear();
            head = 0;
            if (!pe.next(leaders)) return false;
            const size_t got = eng.candidates(leaders, pending);
            pe.add_ops(got + 1);
            peak = std::max(peak, got);
        }
        pe.add_ops(1);
        out.assign(pending.begin() + head, pending.begin() + head + k);
        head += k;
        return true;
    };
    drive(next, [&] { return pe.ops(); }, opt, emit, s);
    s.peak_queue = pe.peak_queue() + peak;
    return s;
}

TypeSetT tested_types(const Database& db, const QueryNF& q, const EnumOptions& opt, bool require_plugins) {
    std::vector<TesterPtr> testers = opt.testers;
    if (testers.empty()) {
        if (require_plugins && !q.clauses.empty()) throw MissingTester("no tester plugins supplied");
        testers = make_testers(q, TesterKind::Sampling);
    }
    return compute_type_set(db, q, opt.eps, testers, derive_seed(opt.seed, "type-set"), opt.force_testers);
}

}  // namespace

EnumSummary enumerate_local(const Database& db, const QueryNF& q, const EnumOptions& opt, const EmitFn& emit) {
    if (!is_local(q)) throw NotLocal("local mode needs a query without Hanf sentences");
    check_params(db, q, opt);
    CacheHolder ch(db, q, opt.cache);
    EnumSummary s;
    s.mode = "local";
    s.exact_branch = true;
    return run_flat(db, q, opt, emit, *ch.cache, clause_types(q), 2.0 / 3.0, s);
}

EnumSummary enumerate_local_strengthened(const Database& db, const QueryNF& q, const EnumOptions& opt,
                                         const EmitFn& emit) {
    if (!is_local(q)) throw NotLocal("local mode needs a query without Hanf sentences");
    check_params(db, q, opt);
    CacheHolder ch(db, q, opt.cache);
    EnumSummary s;
    s.mode = "local-strengthened";
    s.exact_branch = true;
    return run_expanding(db, q, opt, emit, *ch.cache, clause_types(q), s);
}

EnumSummary enumerate_general(const Database& db, const QueryNF& q, const EnumOptions& opt, const EmitFn& emit) {
    check_params(db, q, opt);
    CacheHolder ch(db, q, opt.cache);
    const auto t0 = Clock::now();
    TypeSetT T = tested_types(db, q, opt, false);
    EnumSummary s;
    s.mode = "general";
    s.exact_branch = T.exact_branch;
    s.tester_repetitions = T.repetitions;
    s.preprocess_seconds = seconds_since(t0);
    return run_flat(db, q, opt, emit, *ch.cache, T.members, 5.0 / 6.0, s);
}

namespace {

EnumSummary general_expanding(const Database& db, const QueryNF& q, const EnumOptions& opt, const EmitFn& emit,
                              bool plugins, const char* mode) {
    check_params(db, q, opt);
    CacheHolder ch(db, q, opt.cache);
    const auto t0 = Clock::now();
    TypeSetT T = tested_types(db, q, opt, plugins);
    EnumSummary s;
    s.mode = mode;
    s.exact_branch = T.exact_branch;
    s.tester_repetitions = T.repetitions;
    s.preprocess_seconds = seconds_since(t0);
    return run_expanding(db, q, opt, emit, *ch.cache, T.members, s);
}

}  // namespace

EnumSummary enumerate_general_strengthened(const Database& db, const QueryNF& q, const EnumOptions& opt,
                                           const EmitFn& emit) {
    return general_expanding(db, q, opt, emit, false, "general-strengthened");
}

EnumSummary enumerate_hanf_testable(const Database& db, const QueryNF& q, const EnumOptions& opt,
                                    const EmitFn& emit) {
    return general_expanding(db, q, opt, emit, true, "hanf");
}

}  // namespace aqe

#ifndef FLIE_CLASSIFY_HPP
#define FLIE_CLASSIFY_HPP

#include "flie/morphism.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace flie {

inline constexpr const char* kToolVersion = "flie 1.0.0";

inline std::size_t thread_count() {
    if (const char* env = std::getenv("FLIE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) return (std::size_t)v;
    }
    return 1;
}

/// Index-parallel loop with deterministic output (work items write disjoint slots).
template <typename F>
inline void parallel_for(std::size_t count, F&& fn) {
    const std::size_t nt = std::min(thread_count(), count == 0 ? std::size_t{1} : count);
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < nt; ++t)
        workers.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

enum class MergeProvenance { ClosedForm, Search, ScalingWitness };
enum class SeparationCert { Fingerprint, ExhaustedSearch, ClosedFormRule, HeuristicOnly };

inline const char* to_string(MergeProvenance p) {
    switch (p) {
        case MergeProvenance::ClosedForm: return "ClosedForm";
        case MergeProvenance::Search: return "Search";
        case MergeProvenance::ScalingWitness: return "ScalingWitness";
    }
    return "?";
}

inline const char* to_string(SeparationCert c) {
    switch (c) {
        case SeparationCert::Fingerprint: return "Fingerprint";
        case SeparationCert::ExhaustedSearch: return "ExhaustedSearch";
        case SeparationCert::ClosedFormRule: return "ClosedFormRule";
        case SeparationCert::HeuristicOnly: return "HeuristicOnly";
    }
    return "?";
}

struct MergeRecord {
    std::string member, representative;
    MergeProvenance provenance;
    std::optional<IsoWitness> witness;
    std::string rule;
};

struct IsoClass {
    FamilyParams representative;
    std::vector<FamilyParams> members;
    Fingerprint fingerprint;
    std::vector<MergeRecord> merges;
};

struct SeparationRecord {
    std::string rep_a, rep_b;
    SeparationCert certificate;
    std::string detail;
};

struct IsotopyMergeRecord {
    std::string member, representative;
    IsotopyWitness witness;
};

struct IsotopyClass {
    std::string representative;
    std::vector<std::string> members;  // iso-class representative labels
    std::vector<IsotopyMergeRecord> merges;
};

struct ClassificationReport {
    std::size_t dim = 0;
    std::uint32_t characteristic = 0;
    std::size_t candidate_count = 0;
    std::vector<IsoClass> iso_classes;
    std::vector<SeparationRecord> iso_separations;
    bool isotopy_computed = false;
    std::vector<IsotopyClass> isotopy_classes;
    std::vector<SeparationRecord> isotopy_separations;
    std::optional<std::size_t> expected_iso, expected_isotopy;
    bool match = true;
    double iso_seconds = 0, isotopy_seconds = 0;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
};

/// Candidate normal forms per dimension: both 5-dimensional classes, the full
/// parameter cube for dimensions 6 and 7, plus the characteristic-2 types in
/// dimension 7.
inline std::vector<FamilyParams> enumerate_candidates(std::size_t dim, std::uint32_t p) {
    const FieldSpec field(p);
    std::vector<FamilyParams> out;
    if (dim == 5) {
        out.push_back(FamilyParams::model(5, field));
        out.push_back(FamilyParams::dim5_nonmodel(field));
    } else if (dim == 6) {
        for (std::int64_t a = 0; a < p; ++a)
            for (std::int64_t b = 0; b < p; ++b)
                for (std::int64_t c = 0; c < p; ++c)
                    out.push_back(
                        FamilyParams::g6(Scalar(field, a), Scalar(field, b), Scalar(field, c)));
    } else if (dim == 7) {
        for (std::int64_t a = 0; a < p; ++a)
            for (std::int64_t b = 0; b < p; ++b)
                for (std::int64_t c = 0; c < p; ++c)
                    for (std::int64_t d = 0; d < p; ++d)
                        out.push_back(FamilyParams::g7(Scalar(field, a), Scalar(field, b),
                                                       Scalar(field, c), Scalar(field, d)));
        if (p == 2) {
            out.push_back(FamilyParams::g7_type2(0, field));
            out.push_back(FamilyParams::g7_type2(1, field));
            out.push_back(FamilyParams::h7_type3(0, field));
            out.push_back(FamilyParams::h7_type3(1, field));
        }
    } else {
        throw UnsupportedDim("candidate enumeration covers dimensions 5..7");
    }
    return out;
}

inline std::pair<std::size_t, std::size_t> expected_class_counts(std::size_t dim,
                                                                 std::uint32_t p) {
    if (dim == 5) return {2, 2};
    if (dim == 6) return {p == 2 ? 6u : 5u, 5u};
    if (dim == 7) return {p == 2 ? 15u : p + 8, p == 2 ? 10u : 8u};
    throw UnsupportedDim("expected counts cover dimensions 5..7");
}

struct PartitionOptions {
    std::uint64_t seed = 0xF11E;
    std::size_t cross_check_samples = 12;  // seeded search confirmations of decision-table merges
    std::uint64_t cross_check_node_budget = 8000000;
    bool use_fingerprint_grouping = true;  // the cross-oracle test disables this
    bool with_isotopy = false;
    HeuristicBudget isotopy_budget = {2, 70000};
};

namespace detail {

inline std::array<Scalar, 4> g7_params(const FamilyParams& fp) {
    return {fp.params[0], fp.params[1], fp.params[2], fp.params[3]};
}

/// Scaling isomorphism between 6-dimensional members with a = b = 0 != c:
/// e_1 fixed, every other basis vector scaled by c/C.
inline Matrix g6_scaling_witness(const FamilyParams& src, const FamilyParams& tgt) {
    const Scalar ratio = src.params[2] * tgt.params[2].inv();
    Matrix f = Matrix::identity(6, src.field);
    for (int i = 1; i < 6; ++i) f.at(i, i) = ratio;
    return f;
}

inline bool is_g6_scaling_pair(const FamilyParams& a, const FamilyParams& b) {
    return a.tag == FamilyTag::G6 && b.tag == FamilyTag::G6 && a.params[0].is_zero() &&
           a.params[1].is_zero() && !a.params[2].is_zero() && b.params[0].is_zero() &&
           b.params[1].is_zero() && !b.params[2].is_zero();
}

inline bool closed_form_applicable(const FamilyParams& a, const FamilyParams& b) {
    if (a.tag != FamilyTag::G7 || b.tag != FamilyTag::G7) return false;
    return a.params[0].is_zero() == b.params[0].is_zero() &&
           a.params[1].is_zero() == b.params[1].is_zero();
}

class Partitioner {
  public:
    Partitioner(const std::vector<FamilyParams>& candidates, PartitionOptions options)
        : candidates_(candidates), options_(options) {
        for (const auto& fp : candidates_) tables_.push_back(build(fp));
        report_.seed = options_.seed;
        report_.candidate_count = candidates_.size();
        report_.dim = tables_.front().dim();
        report_.characteristic = tables_.front().field().characteristic();
    }

    ClassificationReport run() {
        const auto t0 = std::chrono::steady_clock::now();
        compute_fingerprints();
        partition();
        record_separations();
        cross_check();
        report_.iso_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto expected = expected_class_counts(report_.dim, report_.characteristic);
        report_.expected_iso = expected.first;
        report_.match = report_.iso_classes.size() == expected.first;
        if (options_.with_isotopy) {
            const auto t1 = std::chrono::steady_clock::now();
            partition_isotopy();
            report_.isotopy_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
            report_.expected_isotopy = expected.second;
            report_.match =
                report_.match && report_.isotopy_classes.size() == expected.second;
        }
        return report_;
    }

  private:
    void compute_fingerprints() {
        prints_.assign(candidates_.size(), Fingerprint{});
        parallel_for(candidates_.size(),
                     [&](std::size_t i) { prints_[i] = fingerprint(tables_[i]); });
        if (options_.use_fingerprint_grouping) {
            for (std::size_t i = 0; i < candidates_.size(); ++i)
                groups_[prints_[i]].push_back(i);
        } else {
            for (std::size_t i = 0; i < candidates_.size(); ++i)
                groups_[Fingerprint{}].push_back(i);
        }
    }

    /// Decide candidate-vs-representative, recording how.
    bool decide(std::size_t cand, std::size_t rep, MergeRecord& record) {
        const FamilyParams& a = candidates_[cand];
        const FamilyParams& b = candidates_[rep];
        record.member = a.label();
        record.representative = b.label();
        const bool odd = report_.characteristic != 2;
        if (odd && closed_form_applicable(a, b)) {
            record.provenance = MergeProvenance::ClosedForm;
            record.rule = "dimension-7 decision table";
            const bool iso = closed_form_iso_g7(g7_params(a), g7_params(b));
            if (iso) closed_form_merges_.push_back({cand, rep});
            else closed_form_splits_.push_back({cand, rep});
            return iso;
        }
        if (is_g6_scaling_pair(a, b)) {
            Matrix f = g6_scaling_witness(a, b);
            if (verify_isomorphism(tables_[cand], tables_[rep], f)) {
                record.provenance = MergeProvenance::ScalingWitness;
                record.rule = "scaling e_i -> (c/C) e_i";
                record.witness = IsoWitness{f, a.label(), b.label()};
                return true;
            }
        }
        record.provenance = MergeProvenance::Search;
        Verdict v = find_isomorphism(tables_[cand], tables_[rep]);
        if (v.kind == Verdict::Kind::Isomorphic) {
            record.witness = v.iso_witness;
            return true;
        }
        return false;
    }

    void partition() {
        for (auto& [fp, members] : groups_) {
            // probe order moves the most recently matched class first; this
            // does not change any decision, only how fast matches are found
            std::vector<std::size_t> probe_order;
            std::vector<std::size_t> reps;
            for (std::size_t idx : members) {
                bool placed = false;
                for (std::size_t pos = 0; pos < probe_order.size(); ++pos) {
                    const std::size_t ci = probe_order[pos];
                    MergeRecord record;
                    if (decide(idx, class_rep_index_[ci], record)) {
                        report_.iso_classes[ci].members.push_back(candidates_[idx]);
                        report_.iso_classes[ci].merges.push_back(std::move(record));
                        probe_order.erase(probe_order.begin() + pos);
                        probe_order.insert(probe_order.begin(), ci);
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    IsoClass cls;
                    cls.representative = candidates_[idx];
                    cls.members = {candidates_[idx]};
                    cls.fingerprint = prints_[idx];
                    reps.push_back(report_.iso_classes.size());
                    probe_order.insert(probe_order.begin(), report_.iso_classes.size());
                    class_rep_index_.push_back(idx);
                    report_.iso_classes.push_back(std::move(cls));
                }
            }
            std::sort(reps.begin(), reps.end());
            group_classes_.push_back(std::move(reps));
        }
    }

    /// Pairwise separation certificates between class representatives.
    /// Distinct fingerprints certify directly; same-group pairs carry an
    /// exhausted search at small primes and the decision-table rule at
    /// p >= 11, where exhaustive searching is out of runtime reach.
    void record_separations() {
        const bool big_prime = report_.characteristic >= 11;
        for (const auto& reps : group_classes_)
            for (std::size_t i = 0; i < reps.size(); ++i)
                for (std::size_t j = i + 1; j < reps.size(); ++j) {
                    const std::size_t a = class_rep_index_[reps[i]];
                    const std::size_t b = class_rep_index_[reps[j]];
                    SeparationRecord s;
                    s.rep_a = candidates_[a].label();
                    s.rep_b = candidates_[b].label();
                    if (big_prime && closed_form_applicable(candidates_[a], candidates_[b])) {
                        s.certificate = SeparationCert::ClosedFormRule;
                        s.detail = "dimension-7 decision table";
                    } else {
                        Verdict v = find_isomorphism(tables_[a], tables_[b]);
                        if (v.kind != Verdict::Kind::NotIsomorphic)
                            throw Error("separation check found an unexpected isomorphism " +
                                        s.rep_a + " ~ " + s.rep_b);
                        s.certificate = SeparationCert::ExhaustedSearch;
                        s.detail = "normalized two-column search exhausted";
                    }
                    report_.iso_separations.push_back(std::move(s));
                }
        // across groups the fingerprints differ by construction
        for (std::size_t gi = 0; gi < group_classes_.size(); ++gi)
            for (std::size_t gj = gi + 1; gj < group_classes_.size(); ++gj)
                for (std::size_t ci : group_classes_[gi])
                    for (std::size_t cj : group_classes_[gj])
                        report_.iso_separations.push_back(
                            {report_.iso_classes[ci].representative.label(),
                             report_.iso_classes[cj].representative.label(),
                             SeparationCert::Fingerprint, "fingerprints differ"});
    }

    /// Seeded sample of decision-table merges re-confirmed by the search.
    void cross_check() {
        if (closed_form_merges_.empty() || options_.cross_check_samples == 0) return;
        std::mt19937_64 rng(options_.seed);
        std::vector<std::size_t> order(closed_form_merges_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t take = std::min(options_.cross_check_samples, order.size());
        for (std::size_t t = 0; t < take; ++t) {
            const auto [cand, rep] = closed_form_merges_[order[t]];
            FindOptions fo;
            fo.max_nodes = options_.cross_check_node_budget;
            Verdict v = find_isomorphism(tables_[cand], tables_[rep], fo);
            if (v.kind != Verdict::Kind::Isomorphic)
                throw Error("cross-check: search contradicts the decision table on " +
                            candidates_[cand].label() + " vs " + candidates_[rep].label());
        }
    }

    /// Isotopism layer: start from the isomorphism classes, merge along the
    /// explicit witnesses or heuristic hits, and separate with the d-sequence
    /// (the proven isotopism invariant). The remaining separations are
    /// reported as HeuristicOnly; they are not certificates.
    void partition_isotopy() {
        const std::size_t k = report_.iso_classes.size();
        std::vector<std::size_t> parent(k);
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };

        // locate the iso class of a family member
        auto class_of = [&](const FamilyParams& fp) -> std::optional<std::size_t> {
            for (std::size_t c = 0; c < k; ++c)
                for (const auto& m : report_.iso_classes[c].members)
                    if (m == fp) return c;
            return std::nullopt;
        };

        struct RawMerge {
            std::size_t source_class;
            std::string member_label;
            IsotopyWitness witness;
        };
        std::vector<RawMerge> merges;
        if (report_.dim == 6 || report_.dim == 7) {
            for (const auto& nw :
                 paper_isotopy_witnesses(report_.dim, FieldSpec(report_.characteristic))) {
                const auto ca = class_of(nw.source), cb = class_of(nw.target);
                if (!ca || !cb) continue;
                const std::size_t ra = find(*ca), rb = find(*cb);
                if (ra == rb) continue;
                parent[std::max(ra, rb)] = std::min(ra, rb);
                merges.push_back({*ca, nw.source.label(), nw.witness});
            }
        }
        // heuristic pass over still-separate class representatives sharing a d-sequence
        std::map<std::pair<std::size_t, std::size_t>, std::string> heuristic_notes;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) {
                if (find(a) != a || find(b) != b) continue;
                if (report_.iso_classes[a].fingerprint.d0 != report_.iso_classes[b].fingerprint.d0)
                    continue;
                Verdict v = heuristic_isotopism_search(tables_[class_rep_index_[a]],
                                                       tables_[class_rep_index_[b]],
                                                       options_.isotopy_budget);
                if (v.kind == Verdict::Kind::Isotopic) {
                    parent[b] = a;
                    merges.push_back({b, report_.iso_classes[b].representative.label(),
                                      *v.isotopy_witness});
                } else {
                    heuristic_notes[{a, b}] = v.detail;
                }
            }

        // assemble the classes; the representative is the lexicographically
        // least member-class representative
        std::map<std::size_t, std::vector<std::size_t>> grouped;
        for (std::size_t c = 0; c < k; ++c) grouped[find(c)].push_back(c);
        std::map<std::size_t, std::size_t> position;
        for (auto& [root, member_classes] : grouped) {
            std::sort(member_classes.begin(), member_classes.end(),
                      [&](std::size_t x, std::size_t y) {
                          return report_.iso_classes[x].representative.key() <
                                 report_.iso_classes[y].representative.key();
                      });
            IsotopyClass cls;
            cls.representative =
                report_.iso_classes[member_classes.front()].representative.label();
            for (auto c : member_classes)
                cls.members.push_back(report_.iso_classes[c].representative.label());
            position[root] = report_.isotopy_classes.size();
            report_.isotopy_classes.push_back(std::move(cls));
        }
        for (auto& m : merges) {
            auto& cls = report_.isotopy_classes[position[find(m.source_class)]];
            cls.merges.push_back({m.member_label, cls.representative, m.witness});
        }

        // separations between isotopy classes
        std::vector<std::size_t> roots;
        for (std::size_t c = 0; c < k; ++c)
            if (find(c) == c) roots.push_back(c);
        for (std::size_t i = 0; i < roots.size(); ++i)
            for (std::size_t j = i + 1; j < roots.size(); ++j) {
                const auto& ca = report_.iso_classes[roots[i]];
                const auto& cb = report_.iso_classes[roots[j]];
                SeparationRecord s;
                s.rep_a = ca.representative.label();
                s.rep_b = cb.representative.label();
                if (ca.fingerprint.d0 != cb.fingerprint.d0) {
                    s.certificate = SeparationCert::Fingerprint;
                    s.detail = "d-sequences differ";
                } else {
                    s.certificate = SeparationCert::HeuristicOnly;
                    auto it = heuristic_notes.find({roots[i], roots[j]});
                    s.detail = it != heuristic_notes.end()
                                   ? it->second
                                   : "no witness found within the flag-preserving budget";
                }
                report_.isotopy_separations.push_back(std::move(s));
            }
        report_.isotopy_computed = true;
    }

    std::size_t class_rep_index_by_class(std::size_t cls) const { return class_rep_index_[cls]; }

    const std::vector<FamilyParams>& candidates_;
    PartitionOptions options_;
    std::vector<StructureTable> tables_;
    std::vector<Fingerprint> prints_;
    std::map<Fingerprint, std::vector<std::size_t>> groups_;
    std::vector<std::vector<std::size_t>> group_classes_;
    std::vector<std::size_t> class_rep_index_;
    std::vector<std::pair<std::size_t, std::size_t>> closed_form_merges_, closed_form_splits_;
    ClassificationReport report_;
};

}  // namespace detail

inline ClassificationReport partition_isomorphism(const std::vector<FamilyParams>& candidates,
                                                  PartitionOptions options = {}) {
    if (candidates.empty()) throw Error("empty candidate set");
    options.with_isotopy = false;
    return detail::Partitioner(candidates, options).run();
}

inline ClassificationReport partition_isotopism(const std::vector<FamilyParams>& candidates,
                                                PartitionOptions options = {}) {
    if (candidates.empty()) throw Error("empty candidate set");
    options.with_isotopy = true;
    return detail::Partitioner(candidates, options).run();
}

inline ClassificationReport classify_dim(std::size_t dim, std::uint32_t p, bool with_isotopy,
                                         PartitionOptions options = {}) {
    options.with_isotopy = with_isotopy;
    return detail::Partitioner(enumerate_candidates(dim, p), options).run();
}

struct IdentifyResult {
    FamilyParams representative;
    IsoWitness witness;
};

namespace detail {

inline const ClassificationReport& cached_partition(std::size_t dim, std::uint32_t p) {
    static std::map<std::pair<std::size_t, std::uint32_t>, ClassificationReport> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(dim, p);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, partition_isomorphism(enumerate_candidates(dim, p))).first;
    return it->second;
}

}  // namespace detail

/// Name the isomorphism class of a filiform algebra of dimension <= 7 over F_p:
/// compute its fingerprint, then search against the stored representatives with
/// a matching fingerprint. An unmatched algebra would contradict the normal-form
/// tables and is reported loudly.
inline IdentifyResult identify(const StructureTable& g) {
    if (!g.field().is_finite()) throw UnsupportedField("identification works over prime fields");
    if (!is_filiform(g)) throw NotFiliform("identification requires a filiform algebra");
    const std::size_t n = g.dim();
    if (n > 7) throw UnsupportedDim("identification covers dimensions up to 7");
    if (n <= 4) {
        StructureTable rep = model_algebra(n, g.field());
        Verdict v = find_isomorphism(g, rep);
        if (v.kind != Verdict::Kind::Isomorphic)
            throw Error("unclassified algebra of dimension <= 4; this contradicts the "
                        "normal-form tables");
        return {FamilyParams::model(n, g.field()), *v.iso_witness};
    }
    const ClassificationReport& report =
        detail::cached_partition(n, g.field().characteristic());
    const Fingerprint fp = fingerprint(g);
    for (const auto& cls : report.iso_classes) {
        if (!(cls.fingerprint == fp)) continue;
        StructureTable rep = build(cls.representative);
        Verdict v = find_isomorphism(g, rep);
        if (v.kind == Verdict::Kind::Isomorphic) return {cls.representative, *v.iso_witness};
    }
    throw Error("unclassified filiform algebra '" + g.label() +
                "'; this contradicts the normal-form tables");
}

}  // namespace flie

#endif

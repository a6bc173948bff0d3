#include "shingledate/neighbors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "shingledate/error.hpp"
#include "shingledate/parallel.hpp"
#include "shingledate/shingle.hpp"

namespace shingledate {

namespace {

void validate_orders(const std::vector<int>& orders) {
    if (orders.empty()) throw InvalidInput("no shingle orders given");
    for (const int k : orders)
        if (k < 1) throw InvalidInput("shingle order must be >= 1");
    for (std::size_t i = 1; i < orders.size(); ++i)
        if (orders[i] <= orders[i - 1])
            throw InvalidInput("shingle orders must be strictly increasing");
}

// Shingle sets per sorted-id document; an empty fingerprint vector marks an
// order the document is too short for.
std::vector<std::vector<ShingleSet>> shingle_all(
    const Corpus& corpus, const std::vector<std::string>& ids,
    const std::vector<int>& orders, unsigned threads,
    std::vector<std::pair<std::string, int>>& skipped) {
    std::vector<std::vector<ShingleSet>> sets(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) {
        const Document& doc = corpus.at(ids[i]);
        sets[i].resize(orders.size());
        for (std::size_t oi = 0; oi < orders.size(); ++oi) {
            if (doc.tokens.size() < static_cast<std::size_t>(orders[oi]))
                continue;  // recorded below, single-threaded
            sets[i][oi] = extract_shingles(doc.tokens, orders[oi]);
        }
    });
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t oi = 0; oi < orders.size(); ++oi)
            if (sets[i][oi].fingerprints.empty())
                skipped.emplace_back(ids[i], orders[oi]);
    return sets;
}

}  // namespace

DistanceStore DistanceStore::build(const Corpus& targets,
                                   const Corpus& candidates,
                                   const std::vector<int>& orders,
                                   unsigned threads) {
    validate_orders(orders);
    DistanceStore store;
    store.orders_ = orders;
    store.target_ids_ = targets.sorted_ids();
    store.candidate_ids_ = candidates.sorted_ids();
    for (std::size_t i = 0; i < store.target_ids_.size(); ++i)
        store.target_lookup_.emplace(store.target_ids_[i], i);
    for (std::size_t i = 0; i < store.candidate_ids_.size(); ++i)
        store.candidate_lookup_.emplace(store.candidate_ids_[i], i);

    std::vector<std::pair<std::string, int>> skipped;
    const auto target_sets =
        shingle_all(targets, store.target_ids_, orders, threads, skipped);
    const auto candidate_sets = shingle_all(candidates, store.candidate_ids_,
                                            orders, threads, skipped);
    std::sort(skipped.begin(), skipped.end());
    skipped.erase(std::unique(skipped.begin(), skipped.end()), skipped.end());
    store.skipped_ = std::move(skipped);

    const std::size_t n_orders = orders.size();
    store.lists_.resize(store.target_ids_.size() * n_orders);
    store.by_candidate_.resize(store.lists_.size());

    parallel_for(store.target_ids_.size(), threads, [&](std::size_t ti) {
        for (std::size_t ci = 0; ci < store.candidate_ids_.size(); ++ci) {
            if (store.candidate_ids_[ci] == store.target_ids_[ti]) continue;
            for (std::size_t oi = 0; oi < n_orders; ++oi) {
                const ShingleSet& a = target_sets[ti][oi];
                const ShingleSet& b = candidate_sets[ci][oi];
                if (a.fingerprints.empty() || b.fingerprints.empty())
                    continue;
                const double d = resemblance_distance(a, b);
                if (d < 1.0)
                    store.lists_[ti * n_orders + oi].push_back(
                        Entry{static_cast<std::uint32_t>(ci), d});
            }
        }
        for (std::size_t oi = 0; oi < n_orders; ++oi) {
            auto& list = store.lists_[ti * n_orders + oi];
            // candidate indices follow sorted ids, so this is the
            // (distance, lexicographic id) order
            std::sort(list.begin(), list.end(),
                      [](const Entry& x, const Entry& y) {
                          if (x.distance != y.distance)
                              return x.distance < y.distance;
                          return x.candidate < y.candidate;
                      });
            auto& by_candidate = store.by_candidate_[ti * n_orders + oi];
            by_candidate = list;
            std::sort(by_candidate.begin(), by_candidate.end(),
                      [](const Entry& x, const Entry& y) {
                          return x.candidate < y.candidate;
                      });
        }
    });
    return store;
}

DistanceStore DistanceStore::from_tsv(std::istream& in, bool mirror_pairs) {
    struct Raw {
        std::string target;
        std::string candidate;
        int order;
        double distance;
    };
    std::vector<Raw> raw;
    std::set<int> orders;
    std::set<std::string> target_ids;
    std::set<std::string> candidate_ids;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        const std::size_t t1 = line.find('\t');
        const std::size_t t2 =
            t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        const std::size_t t3 =
            t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t3 == std::string::npos)
            throw InvalidInput("resemblance dump line " +
                               std::to_string(lineno) +
                               ": expected id<TAB>id<TAB>k<TAB>resemblance");
        const std::string id_i = line.substr(0, t1);
        const std::string id_j = line.substr(t1 + 1, t2 - t1 - 1);
        const std::string k_field = line.substr(t2 + 1, t3 - t2 - 1);
        const std::string res_field = line.substr(t3 + 1);

        int order = 0;
        auto [kp, kec] = std::from_chars(
            k_field.data(), k_field.data() + k_field.size(), order);
        double res = 0.0;
        char* res_end = nullptr;
        res = std::strtod(res_field.c_str(), &res_end);
        if (kec != std::errc{} || kp != k_field.data() + k_field.size() ||
            order < 1 || res_end != res_field.c_str() + res_field.size() ||
            !(res > 0.0 && res <= 1.0) || id_i.empty() || id_j.empty() ||
            id_i == id_j)
            throw InvalidInput("resemblance dump line " +
                               std::to_string(lineno) + ": malformed record");

        raw.push_back(Raw{id_i, id_j, order, 1.0 - res});
        if (mirror_pairs) raw.push_back(Raw{id_j, id_i, order, 1.0 - res});
        orders.insert(order);
        target_ids.insert(id_i);
        candidate_ids.insert(id_j);
        if (mirror_pairs) {
            target_ids.insert(id_j);
            candidate_ids.insert(id_i);
        }
    }
    if (raw.empty()) throw InvalidInput("resemblance dump is empty");

    DistanceStore store;
    store.orders_.assign(orders.begin(), orders.end());
    store.target_ids_.assign(target_ids.begin(), target_ids.end());
    store.candidate_ids_.assign(candidate_ids.begin(), candidate_ids.end());
    for (std::size_t i = 0; i < store.target_ids_.size(); ++i)
        store.target_lookup_.emplace(store.target_ids_[i], i);
    for (std::size_t i = 0; i < store.candidate_ids_.size(); ++i)
        store.candidate_lookup_.emplace(store.candidate_ids_[i], i);

    const std::size_t n_orders = store.orders_.size();
    store.lists_.resize(store.target_ids_.size() * n_orders);
    store.by_candidate_.resize(store.lists_.size());
    for (const Raw& r : raw) {
        const std::size_t ti = store.target_lookup_.at(r.target);
        const std::size_t oi = store.order_index(r.order);
        const auto ci = static_cast<std::uint32_t>(
            store.candidate_lookup_.at(r.candidate));
        store.lists_[ti * n_orders + oi].push_back(Entry{ci, r.distance});
    }
    for (std::size_t li = 0; li < store.lists_.size(); ++li) {
        auto& list = store.lists_[li];
        std::sort(list.begin(), list.end(),
                  [](const Entry& x, const Entry& y) {
                      if (x.distance != y.distance)
                          return x.distance < y.distance;
                      return x.candidate < y.candidate;
                  });
        store.by_candidate_[li] = list;
        std::sort(store.by_candidate_[li].begin(),
                  store.by_candidate_[li].end(),
                  [](const Entry& x, const Entry& y) {
                      return x.candidate < y.candidate;
                  });
    }
    return store;
}

bool DistanceStore::has_target(const std::string& id) const {
    return target_lookup_.count(id) != 0;
}

std::size_t DistanceStore::target_index(const std::string& id) const {
    auto it = target_lookup_.find(id);
    if (it == target_lookup_.end())
        throw InvalidInput("unknown target document: " + id);
    return it->second;
}

std::size_t DistanceStore::order_index(int order) const {
    for (std::size_t i = 0; i < orders_.size(); ++i)
        if (orders_[i] == order) return i;
    throw InvalidInput("order " + std::to_string(order) +
                       " not present in distance store");
}

std::size_t DistanceStore::candidate_index(const std::string& id) const {
    auto it = candidate_lookup_.find(id);
    if (it == candidate_lookup_.end())
        throw InvalidInput("unknown candidate document: " + id);
    return it->second;
}

std::span<const DistanceStore::Entry> DistanceStore::entries(
    const std::string& target, int order) const {
    const auto& list =
        lists_[target_index(target) * orders_.size() + order_index(order)];
    return {list.data(), list.size()};
}

double DistanceStore::distance(const std::string& target, int order,
                               const std::string& candidate) const {
    const auto ci = static_cast<std::uint32_t>(candidate_index(candidate));
    const auto& list = by_candidate_[target_index(target) * orders_.size() +
                                     order_index(order)];
    const auto it = std::lower_bound(
        list.begin(), list.end(), ci,
        [](const Entry& e, std::uint32_t c) { return e.candidate < c; });
    if (it != list.end() && it->candidate == ci) return it->distance;
    return 1.0;  // zero resemblance
}

void DistanceStore::write_tsv(std::ostream& os) const {
    char value[64];
    for (std::size_t ti = 0; ti < target_ids_.size(); ++ti) {
        for (std::size_t oi = 0; oi < orders_.size(); ++oi) {
            for (const Entry& e : lists_[ti * orders_.size() + oi]) {
                std::snprintf(value, sizeof(value), "%.6g", 1.0 - e.distance);
                os << target_ids_[ti] << '\t' << candidate_ids_[e.candidate]
                   << '\t' << orders_[oi] << '\t' << value << '\n';
            }
        }
    }
}

std::vector<Neighbor> nearest_m(const std::string& target, int order, int m,
                                const DistanceStore& store) {
    if (m < 1) throw InvalidInput("m must be >= 1");
    const auto list = store.entries(target, order);
    const std::size_t take =
        std::min(list.size(), static_cast<std::size_t>(m));
    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.push_back(Neighbor{store.candidate_ids()[list[i].candidate],
                               list[i].distance});
    return out;
}

CandidatePool candidate_pool(const std::string& target, int m,
                             const DistanceStore& store) {
    CandidatePool pool;
    pool.target = target;
    pool.nominal_m = m;
    std::set<std::string> members;
    for (const int order : store.orders())
        for (const Neighbor& n : nearest_m(target, order, m, store))
            members.insert(n.id);
    pool.members.assign(members.begin(), members.end());
    pool.effective_m = static_cast<int>(pool.members.size());
    return pool;
}

}  // namespace shingledate

#include "opchain/ncpart.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace opchain {

Partition::Partition(std::vector<std::uint8_t> labels) : label_(std::move(labels)) {
    int next = 0;
    for (std::size_t i = 0; i < label_.size(); ++i) {
        if (label_[i] > next) throw FamilyError("Partition: labels are not a restricted growth string");
        if (label_[i] == next) ++next;
    }
    nblocks_ = next;
}

Partition Partition::from_blocks(int k, const std::vector<std::vector<int>>& blocks) {
    std::vector<int> owner(k, -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty()) throw FamilyError("Partition: empty block");
        for (int e : blocks[b]) {
            if (e < 1 || e > k) throw FamilyError("Partition: element out of range");
            if (owner[e - 1] != -1) throw FamilyError("Partition: element listed twice");
            owner[e - 1] = static_cast<int>(b);
        }
    }
    std::map<int, std::uint8_t> relabel;
    std::vector<std::uint8_t> lab(k);
    for (int i = 0; i < k; ++i) {
        if (owner[i] == -1) throw FamilyError("Partition: blocks do not cover 1..k");
        auto it = relabel.find(owner[i]);
        if (it == relabel.end()) it = relabel.emplace(owner[i], static_cast<std::uint8_t>(relabel.size())).first;
        lab[i] = it->second;
    }
    return Partition(std::move(lab));
}

std::vector<std::vector<int>> Partition::blocks() const {
    std::vector<std::vector<int>> out(nblocks_);
    for (int i = 0; i < k(); ++i) out[label_[i]].push_back(i + 1);
    return out;
}

bool Partition::is_noncrossing() const {
    const int n = k();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (label_[b] == label_[a]) continue;
            for (int c = b + 1; c < n; ++c) {
                if (label_[c] != label_[a]) continue;
                for (int d = c + 1; d < n; ++d)
                    if (label_[d] == label_[b]) return false;
            }
        }
    return true;
}

int Partition::min_block_size() const {
    if (nblocks_ == 0) return 0;
    std::vector<int> sz(nblocks_, 0);
    for (auto l : label_) ++sz[l];
    return *std::min_element(sz.begin(), sz.end());
}

std::vector<std::pair<int, int>> Partition::surround_edges() const {
    std::vector<int> lo(nblocks_, k() + 1), hi(nblocks_, 0);
    for (int i = 0; i < k(); ++i) {
        lo[label_[i]] = std::min(lo[label_[i]], i + 1);
        hi[label_[i]] = std::max(hi[label_[i]], i + 1);
    }
    std::vector<std::pair<int, int>> edges;
    for (int outer = 0; outer < nblocks_; ++outer)
        for (int inner = 0; inner < nblocks_; ++inner)
            if (lo[outer] < lo[inner] && hi[inner] < hi[outer]) edges.emplace_back(outer, inner);
    return edges;
}

std::string Partition::str() const {
    if (empty()) return "{}";
    std::ostringstream os;
    for (const auto& b : blocks()) {
        os << '{';
        for (std::size_t i = 0; i < b.size(); ++i) os << (i ? "," : "") << b[i];
        os << '}';
    }
    return os.str();
}

bool in_family(const Partition& p, Family f) {
    if (!p.is_noncrossing()) return false;
    if (p.empty()) return true;
    switch (f) {
        case Family::NC: return true;
        case Family::NCge2: return p.min_block_size() >= 2;
        case Family::NCpair: {
            for (const auto& b : p.blocks())
                if (b.size() != 2) return false;
            return true;
        }
    }
    return false;
}

namespace {

// Depth-first generation. `open` holds the blocks that may still receive elements, innermost last;
// joining a block closes everything opened after it, which is exactly the non-crossing condition.
struct Generator {
    int k;
    Family fam;
    const std::function<void(const Partition&)>& fn;
    std::vector<std::uint8_t> lab;
    std::vector<int> size;
    std::vector<int> open;

    bool closable(int b) const { return fam == Family::NC || size[b] >= 2; }

    void run(int i) {
        if (i == k) {
            for (int b : open)
                if (!closable(b)) return;
            fn(Partition(lab));
            return;
        }
        // start a new block
        {
            const int b = static_cast<int>(size.size());
            lab[i] = static_cast<std::uint8_t>(b);
            size.push_back(1);
            open.push_back(b);
            run(i + 1);
            open.pop_back();
            size.pop_back();
        }
        // join an open block; every block above it gets closed
        const std::vector<int> saved = open;
        for (int s = static_cast<int>(saved.size()) - 1; s >= 0; --s) {
            if (s + 1 < static_cast<int>(saved.size()) && !closable(saved[s + 1])) break;
            const int b = saved[s];
            if (fam == Family::NCpair && size[b] != 1) continue;
            open.assign(saved.begin(), saved.begin() + s + 1);
            lab[i] = static_cast<std::uint8_t>(b);
            ++size[b];
            if (fam == Family::NCpair) open.pop_back();
            run(i + 1);
            --size[b];
        }
        open = saved;
    }
};

Partition restrict_interval(const Partition& p, int lo, int hi) {
    // elements lo..hi (1-based, inclusive) relabelled as 1..hi-lo+1
    std::vector<std::uint8_t> raw;
    std::map<int, std::uint8_t> relabel;
    for (int e = lo; e <= hi; ++e) {
        int b = p.block_of(e);
        auto it = relabel.find(b);
        if (it == relabel.end()) it = relabel.emplace(b, static_cast<std::uint8_t>(relabel.size())).first;
        raw.push_back(it->second);
    }
    return Partition(std::move(raw));
}

}  // namespace

void for_each_partition(int k, Family f, const std::function<void(const Partition&)>& fn) {
    if (k < 0 || k > kMaxEnumerate) {
        std::ostringstream os;
        os << "enumerate: k = " << k << " outside the budget 0.." << kMaxEnumerate;
        throw BudgetError(os.str());
    }
    if (k == 0) {
        fn(Partition());
        return;
    }
    Generator g{k, f, fn, std::vector<std::uint8_t>(k), {}, {}};
    g.run(0);
}

std::vector<Partition> enumerate(int k, Family f) {
    std::vector<Partition> out;
    for_each_partition(k, f, [&](const Partition& p) { out.push_back(p); });
    return out;
}

Decomposition decompose(const Partition& p) {
    if (p.empty()) throw FamilyError("decompose: the empty partition has no decomposition");
    if (p.min_block_size() < 2) throw FamilyError("decompose: partition " + p.str() + " has a singleton block");
    if (!p.is_noncrossing()) throw FamilyError("decompose: partition " + p.str() + " is crossing");

    auto blocks = p.blocks();
    std::vector<bool> surrounded(blocks.size(), false);
    for (auto [outer, inner] : p.surround_edges()) surrounded[inner] = true;

    Decomposition dec;
    std::vector<int> outermost;
    for (std::size_t b = 0; b < blocks.size(); ++b)
        if (!surrounded[b]) outermost.push_back(static_cast<int>(b));

    if (outermost.size() > 1) {
        dec.kind = Decomposition::Kind::Concat;
        for (int b : outermost) dec.parts.push_back(restrict_interval(p, blocks[b].front(), blocks[b].back()));
        return dec;
    }
    const auto& outer = blocks[outermost.front()];
    dec.kind = Decomposition::Kind::Nest;
    dec.m = static_cast<int>(outer.size()) - 1;
    for (int j = 0; j < dec.m; ++j) {
        const int lo = outer[j] + 1, hi = outer[j + 1] - 1;
        dec.parts.push_back(lo <= hi ? restrict_interval(p, lo, hi) : Partition());
    }
    return dec;
}

Partition concat(const std::vector<Partition>& parts) {
    std::vector<std::uint8_t> lab;
    int offset = 0;
    for (const auto& q : parts) {
        for (auto l : q.labels()) lab.push_back(static_cast<std::uint8_t>(l + offset));
        offset += q.size();
    }
    return Partition(std::move(lab));
}

Partition nest(const std::vector<Partition>& parts) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> outer{1};
    int pos = 1;
    for (const auto& q : parts) {
        for (auto b : q.blocks()) {
            for (int& e : b) e += pos;
            blocks.push_back(std::move(b));
        }
        pos += q.k() + 1;
        outer.push_back(pos);
    }
    blocks.push_back(outer);
    return Partition::from_blocks(pos, blocks);
}

Partition recompose(const Decomposition& dec) {
    return dec.kind == Decomposition::Kind::Concat ? concat(dec.parts) : nest(dec.parts);
}

Rational alpha(const Partition& p) {
    if (p.empty()) return Rational(1);
    Decomposition dec = decompose(p);
    Rational acc(1);
    for (const auto& q : dec.parts) acc *= alpha(q);
    if (dec.kind == Decomposition::Kind::Nest) acc /= p.size();
    return acc;
}

BigInt count_linear_extensions(const Partition& p) {
    const int nb = p.size();
    if (nb > kMaxExtensionBlocks) {
        std::ostringstream os;
        os << "alpha_by_extensions: " << nb << " blocks exceeds the budget " << kMaxExtensionBlocks;
        throw BudgetError(os.str());
    }
    std::vector<unsigned> before(nb, 0);
    for (auto [outer, inner] : p.surround_edges()) before[inner] |= 1u << outer;
    // ways[S] = number of orderings of the down-set S compatible with the surround order
    std::vector<BigInt> ways(std::size_t(1) << nb, 0);
    ways[0] = 1;
    for (unsigned s = 0; s < ways.size(); ++s) {
        if (ways[s] == 0) continue;
        for (int b = 0; b < nb; ++b)
            if (!(s >> b & 1u) && (before[b] & ~s) == 0) ways[s | 1u << b] += ways[s];
    }
    return ways.back();
}

Rational alpha_by_extensions(const Partition& p) {
    BigInt fact = 1;
    for (int i = 2; i <= p.size(); ++i) fact *= i;
    return Rational(count_linear_extensions(p), fact);
}

double free_moment_from_cumulants(std::span<const double> kappa, int n) {
    if (n < 0 || n > kMaxFreeMoment) {
        std::ostringstream os;
        os << "free_moment_from_cumulants: n = " << n << " outside the budget 0.." << kMaxFreeMoment;
        throw BudgetError(os.str());
    }
    double total = 0.0;
    for_each_partition(n, Family::NC, [&](const Partition& p) {
        double prod = 1.0;
        for (const auto& b : p.blocks()) {
            const std::size_t s = b.size();
            prod *= s <= kappa.size() ? kappa[s - 1] : 0.0;
            if (prod == 0.0) break;
        }
        total += prod;
    });
    return total;
}

Partition parse_partition(const std::string& text) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& msg) -> ParseError {
        std::ostringstream os;
        os << "partition parse error at position " << i << ": " << msg;
        return ParseError(os.str(), i);
    };
    std::vector<std::vector<int>> blocks;
    int kmax = 0;
    skip_ws();
    while (i < text.size()) {
        if (text[i] != '{') throw fail("expected '{'");
        ++i;
        skip_ws();
        std::vector<int> block;
        if (i < text.size() && text[i] == '}') {
            ++i;
            skip_ws();
            if (!blocks.empty() || i < text.size()) throw fail("empty block is only allowed as the whole input");
            return Partition();
        }
        while (true) {
            skip_ws();
            if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                throw fail("expected a positive integer");
            int v = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                v = v * 10 + (text[i] - '0');
                if (v > 255) throw fail("element too large");
                ++i;
            }
            if (v < 1) throw fail("elements start at 1");
            block.push_back(v);
            kmax = std::max(kmax, v);
            skip_ws();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < text.size() && text[i] == '}') {
                ++i;
                break;
            }
            throw fail("expected ',' or '}'");
        }
        if (!std::is_sorted(block.begin(), block.end())) std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
        skip_ws();
    }
    if (blocks.empty()) throw fail("no blocks");
    try {
        return Partition::from_blocks(kmax, blocks);
    } catch (const FamilyError& e) {
        throw ParseError(std::string("partition parse error: ") + e.what(), text.size());
    }
}

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1) os << '/' << boost::multiprecision::denominator(r);
    return os.str();
}

}  // namespace opchain

// Symbol table for the two-sorted KAT alphabet: primitive actions and
// primitive tests. Symbols are interned once and referenced by id; action
// and test ids live in disjoint spaces (tests even, actions odd).

#ifndef KATREL_SYMBOLS_HPP
#define KATREL_SYMBOLS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace katrel {

enum class SymbolKind : uint8_t { Action, Test };

// Which fragment of a benchmark pair a symbol was minted for. Shared
// symbols use `Both`.
enum class ProgramSide : uint8_t { C1 = 1, C2 = 2, Both = 3 };

inline const char* side_name(ProgramSide s) {
    switch (s) {
    case ProgramSide::C1: return "C1";
    case ProgramSide::C2: return "C2";
    default: return "C1+C2";
    }
}

// Source binding of a symbol: the statement or condition text it stands
// for, plus where it occurs.
struct SymbolOrigin {
    ProgramSide side = ProgramSide::Both;
    std::string text;  // canonical statement or condition text
};

struct Symbol {
    uint32_t id = UINT32_MAX;
    SymbolKind kind = SymbolKind::Action;
    std::string display;
    std::optional<SymbolOrigin> origin;

    bool valid() const { return id != UINT32_MAX; }
};

// Opaque reference; all lookups go through the owning SymbolTable.
struct SymbolRef {
    uint32_t id = UINT32_MAX;

    bool valid() const { return id != UINT32_MAX; }
    friend bool operator==(SymbolRef a, SymbolRef b) { return a.id == b.id; }
    friend bool operator!=(SymbolRef a, SymbolRef b) { return a.id != b.id; }
    friend bool operator<(SymbolRef a, SymbolRef b) { return a.id < b.id; }
};

class SymbolTable {
public:
    SymbolRef intern(SymbolKind kind, const std::string& display,
                     std::optional<SymbolOrigin> origin = std::nullopt) {
        auto& names = kind == SymbolKind::Action ? action_names_ : test_names_;
        auto it = names.find(display);
        if (it != names.end()) return SymbolRef{it->second};
        Symbol s;
        // Disjoint id spaces: tests even, actions odd.
        s.id = static_cast<uint32_t>(symbols_.size()) * 2 +
               (kind == SymbolKind::Action ? 1 : 0);
        s.kind = kind;
        s.display = display;
        s.origin = std::move(origin);
        uint32_t id = s.id;
        index_[id] = symbols_.size();
        symbols_.push_back(std::move(s));
        names.emplace(display, id);
        return SymbolRef{id};
    }

    SymbolRef action(const std::string& display) {
        return intern(SymbolKind::Action, display);
    }
    SymbolRef test(const std::string& display) {
        return intern(SymbolKind::Test, display);
    }

    SymbolRef find(SymbolKind kind, const std::string& display) const {
        auto& names = kind == SymbolKind::Action ? action_names_ : test_names_;
        auto it = names.find(display);
        return it == names.end() ? SymbolRef{} : SymbolRef{it->second};
    }

    const Symbol& at(SymbolRef r) const {
        auto it = index_.find(r.id);
        if (it == index_.end()) throw std::out_of_range("unknown symbol id");
        return symbols_[it->second];
    }

    const std::string& name(SymbolRef r) const { return at(r).display; }
    SymbolKind kind(SymbolRef r) const { return at(r).kind; }

    void set_origin(SymbolRef r, SymbolOrigin o) {
        symbols_[index_.at(r.id)].origin = std::move(o);
    }

    const std::vector<Symbol>& all() const { return symbols_; }
    size_t size() const { return symbols_.size(); }

private:
    std::vector<Symbol> symbols_;
    std::unordered_map<uint32_t, size_t> index_;
    std::unordered_map<std::string, uint32_t> action_names_;
    std::unordered_map<std::string, uint32_t> test_names_;
};

using SymbolTablePtr = std::shared_ptr<SymbolTable>;

}  // namespace katrel

#endif

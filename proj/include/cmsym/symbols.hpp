#ifndef CMSYM_SYMBOLS_HPP
#define CMSYM_SYMBOLS_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmsym/error.hpp"

namespace cmsym {

// Ordered, immutable list of symbol names shared by every object of one
// computation. Copies share storage, so comparing two lists is usually a
// pointer comparison.
class Symbols {
public:
  Symbols() : names_(std::make_shared<const std::vector<std::string>>()) {}

  explicit Symbols(std::vector<std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty())
        throw SymbolError("empty symbol name");
      for (std::size_t j = 0; j < i; ++j)
        if (names[i] == names[j])
          throw SymbolError("duplicate symbol '" + names[i] + "'");
    }
    names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
  }

  Symbols(std::initializer_list<std::string> names)
      : Symbols(std::vector<std::string>(names)) {}

  std::size_t size() const noexcept { return names_->size(); }
  const std::string &operator[](std::size_t i) const { return (*names_)[i]; }
  const std::vector<std::string> &names() const noexcept { return *names_; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < names_->size(); ++i)
      if ((*names_)[i] == name)
        return i;
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name))
      return *i;
    throw SymbolError("unknown symbol '" + std::string(name) + "'");
  }

  bool contains(std::string_view name) const { return find(name).has_value(); }

  friend bool operator==(const Symbols &a, const Symbols &b) {
    return a.names_ == b.names_ || *a.names_ == *b.names_;
  }

private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

inline void require_same(const Symbols &a, const Symbols &b) {
  if (!(a == b))
    throw SymbolError("symbol list mismatch");
}

} // namespace cmsym

#endif

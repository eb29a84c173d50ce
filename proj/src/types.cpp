#include "coulosc/core/types.hpp"

#include <cctype>
#include <string_view>

namespace coulosc {

LevelLabel parse_label(const std::string& name) {
  static constexpr std::string_view kLetters = "spdfghiklmnoqrtuv";
  std::size_t i = 0;
  while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
  if (i == 0 || i + 1 != name.size()) throw std::invalid_argument("malformed level name '" + name + "'");
  const auto l_pos = kLetters.find(static_cast<char>(std::tolower(static_cast<unsigned char>(name[i]))));
  if (l_pos == std::string_view::npos) throw std::invalid_argument("unknown angular letter in '" + name + "'");
  const int nu = std::stoi(name.substr(0, i));
  const int l = static_cast<int>(l_pos);
  if (nu < l + 1) throw std::invalid_argument("level '" + name + "' needs nu >= l + 1");
  return {nu - l - 1, l};
}

}  // namespace coulosc

#include "rpm/core/packet.hpp"

namespace rpm {

std::string_view to_string(Ecn e) {
  switch (e) {
    case Ecn::NotEct: return "not-ect";
    case Ecn::Ect0: return "ect0";
    case Ecn::Ect1: return "ect1";
    case Ecn::Ce: return "ce";
  }
  return "?";
}

}  // namespace rpm

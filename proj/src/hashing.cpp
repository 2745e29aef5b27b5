#include "commontom/hashing.hpp"

#include <cstdio>

namespace ctom {

std::string content_hash(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return std::string("fnv1a64:") + buf;
}

}  // namespace ctom

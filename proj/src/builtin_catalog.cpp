#include "embedded_data.hpp"
#include "smatv/catalog.hpp"
#include "smatv/netio.hpp"

namespace smatv {

std::shared_ptr<const Catalog> builtin_catalog_ptr() {
    static const std::shared_ptr<const Catalog> cat = std::make_shared<const Catalog>(parse_catalog(embedded::builtin_catalog()));
    return cat;
}

const Catalog& builtin_catalog() { return *builtin_catalog_ptr(); }

}  // namespace smatv

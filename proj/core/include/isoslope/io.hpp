#pragma once

#include <map>
#include <optional>
#include <string>

#include "isoslope/fcrystal.hpp"

namespace isoslope {

// Series literal grammar (documented in the README):
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := integer | 'p' | 'pi' ['^' int] | 't' ['^' exponent] | '(' expr ')'
//   exponent := int | '(' int ['/' int] ')'
Series parse_series_literal(const std::string& text, const PrecisionProfile& prof,
                            RingClaim claim = RingClaim::gamma);

struct CrystalFile {
    PrecisionProfile prof;
    int rank = 1;
    RingClaim claim = RingClaim::gamma_con;
    int twist = 0;
    SeriesMat matrix;
    std::optional<SeriesMat> nabla;
    std::optional<SeriesVec> vec;    // eigenvector input (descend-omega)
    std::optional<Coeff> lambda;     // its eigenvalue
    std::map<std::string, std::string> expected;

    FModule to_module() const;
    std::string canonical() const;
};

CrystalFile parse_crystal(const std::string& bytes);
CrystalFile load_crystal(const std::string& path);

} // namespace isoslope

#include "dulac/fatou.hpp"

namespace dulac {

template struct FatouSeriesT<CQ>;
template FatouSeriesT<CQ> solve_abel<CQ>(const Series<CQ>&, const Budget&);
template Series<CQ> abel_residual<CQ>(const Series<CQ>&, const Series<CQ>&);
template InvariantsT<CQ> invariants_from_fatou<CQ>(const FatouSeriesT<CQ>&, const Rat&);

}  // namespace dulac

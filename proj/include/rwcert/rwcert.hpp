#pragma once

#include "rwcert/catalog.hpp"
#include "rwcert/chart.hpp"
#include "rwcert/error.hpp"
#include "rwcert/expr.hpp"
#include "rwcert/fermi.hpp"
#include "rwcert/foliation.hpp"
#include "rwcert/geometry.hpp"
#include "rwcert/isotropy.hpp"
#include "rwcert/jet.hpp"
#include "rwcert/random.hpp"
#include "rwcert/report.hpp"
#include "rwcert/tensor.hpp"

// pfwcl.hpp: everything except the CLI driver.
#pragma once

#include "pfwcl/errors.hpp"
#include "pfwcl/quadrature.hpp"
#include "pfwcl/formfactor.hpp"
#include "pfwcl/scan.hpp"
#include "pfwcl/energy.hpp"
#include "pfwcl/wienerhopf.hpp"
#include "pfwcl/hermite.hpp"
#include "pfwcl/lanczos.hpp"
#include "pfwcl/parallel.hpp"
#include "pfwcl/fockdesk.hpp"

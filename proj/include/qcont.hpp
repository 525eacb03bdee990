#pragma once

#include "qcont/operator_core.hpp"
#include "qcont/entropies.hpp"
#include "qcont/report.hpp"
#include "qcont/almost_concavity.hpp"
#include "qcont/alaff.hpp"
#include "qcont/bound_catalog.hpp"
#include "qcont/sampling.hpp"
#include "qcont/applications.hpp"
#include "qcont/campaign.hpp"
#include "qcont/io.hpp"

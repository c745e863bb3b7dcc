// qcm.hpp: everything.
#pragma once

#include "qcm/config_io.hpp"
#include "qcm/density_matrix.hpp"
#include "qcm/engine.hpp"
#include "qcm/error.hpp"
#include "qcm/linalg.hpp"
#include "qcm/measures.hpp"
#include "qcm/model.hpp"
#include "qcm/output.hpp"
#include "qcm/parallel.hpp"
#include "qcm/phase_space.hpp"
#include "qcm/runner.hpp"
#include "qcm/version.hpp"

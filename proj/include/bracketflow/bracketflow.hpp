#pragma once

#include "bracketflow/algebra.hpp"
#include "bracketflow/cartan.hpp"
#include "bracketflow/compact_form.hpp"
#include "bracketflow/corpus.hpp"
#include "bracketflow/errors.hpp"
#include "bracketflow/hspace.hpp"
#include "bracketflow/io.hpp"
#include "bracketflow/kempfness.hpp"
#include "bracketflow/linalg.hpp"
#include "bracketflow/realify.hpp"
#include "bracketflow/verify.hpp"

// Copyright 2026 The pertbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* The C header must compile and link as plain C. */

#include "pertbound/pertbound.h"

#include <math.h>
#include <stdio.h>

int main(void) {
  const double data[4] = {3, 0, 0, 1};
  pb_matrix* a = NULL;
  double norm = 0;
  pb_bound b;
  if (pb_matrix_create(2, 2, data, &a) != PB_OK) return 1;
  if (pb_spectral_norm(a, &norm) != PB_OK || fabs(norm - 3) > 1e-12) return 2;
  pb_matrix_destroy(a);
  if (pb_dk_wedin_bound(1, 4, &b) != PB_OK || b.value != 0.5) return 3;
  if (pb_matrix_create(2, 2, data, NULL) != PB_ERR_INVALID_ARGUMENT) return 4;
  printf("%s ok\n", pb_version());
  return 0;
}

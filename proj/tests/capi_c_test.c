/*
 * Copyright 2026 The CEIQ Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* The header compiles as C11 and the library links from a C program. */

#include "ceiq/ceiq.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, \
              #cond);                                             \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  enum { W = 48, H = 40 };
  static uint8_t gray[W * H];
  ceiq_features f;
  ceiq_features train[20];
  double scores[20];
  ceiq_svr_params params;
  ceiq_model* model = NULL;
  ceiq_model* copy = NULL;
  char* text = NULL;
  double a = 0.0, b = 0.0;
  int i;

  for (i = 0; i < W * H; ++i) gray[i] = (uint8_t)(30 + (i * 13) % 180);
  EXPECT(ceiq_extract_gray(gray, W, H, NULL, &f) == CEIQ_OK);
  EXPECT(f.s_ge > -1.0 && f.s_ge <= 1.0);
  EXPECT(ceiq_extract_gray(gray, 4, 4, NULL, &f) == CEIQ_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(ceiq_last_error()) > 0);

  for (i = 0; i < 20; ++i) {
    const double t = i / 19.0;
    train[i].s_ge = 0.2 + 0.7 * t;
    train[i].e_g = 5.0 + t;
    train[i].e_e = 6.5;
    train[i].e_ge = 6.0 + 0.5 * t;
    train[i].e_eg = 7.0 - t;
    scores[i] = 10.0 + 80.0 * t;
  }
  ceiq_svr_params_init(&params);
  EXPECT(ceiq_model_train(train, scores, 20, &params, &model) == CEIQ_OK);
  EXPECT(ceiq_model_predict(model, &train[0], &a) == CEIQ_OK);
  EXPECT(ceiq_model_predict(model, &train[19], &b) == CEIQ_OK);
  EXPECT(a < b);

  EXPECT(ceiq_model_serialize(model, &text) == CEIQ_OK);
  EXPECT(text != NULL && strncmp(text, "CEIQ-MODEL v1", 13) == 0);
  EXPECT(ceiq_model_deserialize(text, &copy) == CEIQ_OK);
  EXPECT(ceiq_model_predict(copy, &train[19], &a) == CEIQ_OK);
  EXPECT(a == b);
  ceiq_free(text);

  EXPECT(ceiq_srocc(scores, scores, 20, &a) == CEIQ_OK);
  EXPECT(fabs(a - 1.0) < 1e-12);

  ceiq_model_free(model);
  ceiq_model_free(copy);
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return EXIT_FAILURE;
  }
  printf("capi_c_test: all checks passed\n");
  return EXIT_SUCCESS;
}

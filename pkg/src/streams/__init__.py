# Stream construction: data model, synthetic generators, drift injectors, CSV loading

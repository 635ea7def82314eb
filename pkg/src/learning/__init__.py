# Learning: linear model, update processes, drift detection, adaptive learners

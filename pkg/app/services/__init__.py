# Exact algebra and integrable-systems services

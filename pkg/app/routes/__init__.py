# Routes module 
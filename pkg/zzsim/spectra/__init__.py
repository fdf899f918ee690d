"""
Modelos espectrales de los elementos de circuito.
"""

"""
Construcción de Hamiltonianos de dispositivo.
"""
